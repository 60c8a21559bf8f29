"""Ignition-state indexing.

An ignition state is an auxiliary fine-grained outcome identified with an
integer ``j`` read as a bit vector over configurations.  Configuration
``gamma = k + i*K`` addresses setting ``k`` in region ``i``; the projection
function returns bit ``gamma`` of ``j``, which is the outcome region ``i``
reports when measured with setting ``k``.
"""

from __future__ import annotations

from itertools import combinations

# Full index-space enumeration is allowed only up to this many configuration
# bits; larger systems must supply an explicit working set.
MAX_ENUM_BITS = 24


def config_index(region, setting, num_settings):
    """gamma = k + i*K."""
    return setting + region * num_settings


def config_region(gamma, num_settings):
    return gamma // num_settings


def config_setting(gamma, num_settings):
    return gamma % num_settings


def projection(gamma, j):
    """Outcome bit of ignition state j at configuration gamma."""
    return (j >> gamma) & 1


def index_set(outcome, gamma, num_bits):
    """All ignition indices whose bit at gamma equals the outcome."""
    _check_enum(num_bits)
    return [j for j in range(1 << num_bits) if (j >> gamma) & 1 == outcome]


def target_index_set(x, u, num_settings):
    """Ignition indices compatible with outcome vector x at setting vector u.

    These are the states whose bit at configuration ``u_i + i*K`` equals
    ``x_i`` for every region, i.e. the intersection of the per-region index
    sets.
    """
    n = len(x)
    num_bits = n * num_settings
    _check_enum(num_bits)
    return [j for j in range(1 << num_bits) if in_target(j, x, u, num_settings)]


def in_target(j, x, u, num_settings):
    """Membership test without enumerating the index space."""
    for i, (xi, ui) in enumerate(zip(x, u)):
        if (j >> (ui + i * num_settings)) & 1 != xi:
            return False
    return True


def double_plateau(num_settings):
    """The 2K double-plateau integers in trigonometric order.

    A double-plateau integer has a K-bit expansion that is a chain of
    identical bits with at most one jump.  Trigonometric order starts from
    the K-bit word with floor(K/2) leading zeros followed by ones, and walks
    the cycle so that bit k of element r equals bit 0 of element r-k.
    """
    K = num_settings
    if K < 2:
        raise ValueError("double-plateau sets need at least 2 settings")
    out = []
    for r in range(2 * K):
        j = 0
        for k in range(K):
            if plateau_projection(r - k, K):
                j |= 1 << k
        out.append(j)
    return out


def plateau_projection(r, num_settings):
    """Outcome bit of double-plateau element r under the first setting.

    The ones form a cyclic window of length K placed so the first element
    has floor(K/2) leading zeros; shifting r by the setting index gives
    every other projection: bit k of double_plateau(K)[r] equals
    plateau_projection(r - k, K).
    """
    K = num_settings
    return 1 if (r + (K - 1) // 2) % (2 * K) < K else 0


def bell_lift(j, num_settings):
    """Embed a K-bit totally-correlated ignition state into the 2K-bit space.

    Duplicates the K bits into both regions' blocks, so both regions project
    identical outcomes for identical settings.
    """
    return ((1 << num_settings) + 1) * j


def bell_support(num_settings):
    """Lifted double-plateau working set for 2-region totally correlated systems."""
    return [bell_lift(j, num_settings) for j in double_plateau(num_settings)]


def transitions(j, width):
    """Number of bit flips reading the width-bit expansion of j."""
    bits = [(j >> k) & 1 for k in range(width)]
    return sum(1 for a, b in zip(bits, bits[1:]) if a != b)


def subset_masks(n, size=None):
    """Nonempty region-subset masks, optionally restricted to one size."""
    regions = range(n)
    sizes = range(1, n + 1) if size is None else [size]
    for m in sizes:
        for combo in combinations(regions, m):
            yield sum(1 << i for i in combo)


def mask_regions(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _check_enum(num_bits):
    if num_bits > MAX_ENUM_BITS:
        raise ValueError(
            f"index space 2^{num_bits} too large to enumerate; supply a working set"
        )
