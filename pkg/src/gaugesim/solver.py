"""Gauge distribution synthesis.

A gauge distribution for configuration gamma = (region i0, setting k0)
assigns non-negative weights to ignition states so that, for every setting
vector with u_{i0} = k0 and every outcome vector, the weights of the
compatible states sum to the target probability.  Solutions are found by
exact phase-1 simplex; closed forms are provided for the standard
totally-correlated two-region families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import Infeasible, NegativeEntry, SupportTooSmall, ValidationError
from .ignition import (
    MAX_ENUM_BITS,
    bell_lift,
    bell_support,
    config_region,
    config_setting,
    double_plateau,
    in_target,
    plateau_projection,
    projection,
)
from .model import ProbabilitySystem, is_locally_consistent
from .scalars import EPS_NUM, RATIONAL, deviation, format_value, snap
from .simplex import solve_nonnegative


@dataclass(frozen=True)
class GaugeDistribution:
    """Non-negative weights over ignition states for one configuration."""

    gamma: int
    weights: dict  # ignition index -> Fraction weight, zeros omitted

    def support(self):
        return tuple(sorted(self.weights))

    def weight(self, j):
        return self.weights.get(j, Fraction(0))

    def total(self):
        return sum(self.weights.values())

    def to_dict(self):
        support = self.support()
        return {
            "gamma": self.gamma,
            "support": list(support),
            "weights": [format_value(self.weights[j]) for j in support],
        }

    @classmethod
    def from_dict(cls, data):
        weights = {
            int(j): Fraction(w) if isinstance(w, str) else w
            for j, w in zip(data["support"], data["weights"])
        }
        return cls(data["gamma"], weights)


@dataclass(frozen=True)
class GaugeSet:
    """One gauge distribution per configuration gamma = 0 .. n*K - 1."""

    distributions: tuple

    def __iter__(self):
        return iter(self.distributions)

    def __len__(self):
        return len(self.distributions)

    def by_gamma(self, gamma):
        for dist in self.distributions:
            if dist.gamma == gamma:
                return dist
        raise KeyError(f"no distribution for configuration {gamma}")

    def to_dict(self):
        return {"gauges": [d.to_dict() for d in self.distributions]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(GaugeDistribution.from_dict(d) for d in data["gauges"]))


@dataclass
class GaugeReport:
    """Worst reconstruction deviation of a gauge set against its system."""

    ok: bool
    max_deviation: float
    worst_site: tuple | None = None

    def __bool__(self):
        return self.ok


def _feasibility_slack(system):
    """Phase-1 slack: exact for rational tables, EPS_NUM for snapped floats."""
    if system.backend == RATIONAL:
        return Fraction(0)
    return Fraction(EPS_NUM).limit_denominator(10**12)


def _column_order(columns):
    """Deterministic variable priority for the simplex.

    Even-popcount states first, then ascending index.  Any fixed order gives
    a valid basic solution; this one reproduces the reference working sets
    bundled with the catalog fixtures.
    """
    return sorted(columns, key=lambda j: (bin(j).count("1") & 1, j))


def gauge_equations(system, gamma, support):
    """Equality constraints for one configuration on the given support."""
    n, K = system.n, system.num_settings
    i0 = config_region(gamma, K)
    k0 = config_setting(gamma, K)
    rows, rhs = [], []
    for (x, u), p in system.targets():
        if u[i0] != k0:
            continue
        rows.append([j for j in support if in_target(j, x, u, K)])
        rhs.append(p if system.backend == RATIONAL else snap(p))
    return rows, rhs


def _full_support(system):
    bits = system.n * system.num_settings
    if bits > MAX_ENUM_BITS:
        raise ValidationError(
            f"index space 2^{bits} exceeds the enumeration guard; supply a working set"
        )
    return range(1 << bits)


def solve_gauge(system, gamma, support=None):
    """Gauge distribution for one configuration.

    With no support given the full index space is searched and failure
    proves that a one-step collapse cannot start from this configuration
    (raises Infeasible).  On an explicit working set failure only shows the
    set is too small (raises SupportTooSmall).
    """
    if not is_locally_consistent(system):
        raise ValidationError("system is not completely locally consistent")
    n, K = system.n, system.num_settings
    if not 0 <= gamma < n * K:
        raise ValidationError(f"configuration {gamma} out of range")
    restricted = support is not None
    columns = list(support) if restricted else list(_full_support(system))
    if len(set(columns)) != len(columns):
        raise ValidationError("working set entries must be distinct")

    rows, rhs = gauge_equations(system, gamma, columns)
    solution = solve_nonnegative(
        rows, rhs, _column_order(columns), slack=_feasibility_slack(system)
    )
    if solution is None:
        if restricted:
            raise SupportTooSmall(gamma, len(columns))
        raise Infeasible([gamma])
    weights = {j: w for j, w in solution.items() if w > 0}
    return GaugeDistribution(gamma, weights)


def solve_shared_gauge(system, support=None):
    """One distribution satisfying every configuration's system at once.

    Feasible exactly when the ignition states can act as setting-independent
    hidden variables; returns None otherwise.
    """
    if not is_locally_consistent(system):
        raise ValidationError("system is not completely locally consistent")
    n, K = system.n, system.num_settings
    columns = list(support) if support is not None else list(_full_support(system))
    rows, rhs = [], []
    for gamma in range(n * K):
        r, b = gauge_equations(system, gamma, columns)
        rows.extend(r)
        rhs.extend(b)
    solution = solve_nonnegative(
        rows, rhs, _column_order(columns), slack=_feasibility_slack(system)
    )
    if solution is None:
        return None
    return {j: w for j, w in solution.items() if w > 0}


def solve_all_gauges(system, support=None):
    """One gauge distribution per configuration.

    Tries a single shared distribution first (the hidden-variable case);
    when that fails, each configuration is solved separately.  Raises
    Infeasible listing every configuration without a solution.
    """
    n, K = system.n, system.num_settings
    shared = solve_shared_gauge(system, support)
    if shared is not None:
        return GaugeSet(tuple(GaugeDistribution(g, dict(shared)) for g in range(n * K)))

    dists = []
    failed = []
    for gamma in range(n * K):
        try:
            dists.append(solve_gauge(system, gamma, support))
        except (Infeasible, SupportTooSmall):
            failed.append(gamma)
    if failed:
        raise Infeasible(failed)
    return GaugeSet(tuple(dists))


def one_step_feasible(system, support=None):
    try:
        solve_all_gauges(system, support)
        return True
    except Infeasible:
        return False


def reconstruct(gauge, x, u, num_settings):
    """Probability of target (x|u) reconstructed from one gauge distribution."""
    return sum(
        w for j, w in gauge.weights.items() if in_target(j, x, u, num_settings)
    )


def verify_consistency(system, gauges):
    """Check every target against every compatible gauge distribution.

    A distribution for configuration gamma is compatible with setting vector
    u when u selects gamma's setting in gamma's region.  Reports the largest
    reconstruction deviation.
    """
    K = system.num_settings
    worst = 0.0
    worst_site = None
    for dist in gauges:
        i0 = config_region(dist.gamma, K)
        k0 = config_setting(dist.gamma, K)
        for (x, u), p in system.targets():
            if u[i0] != k0:
                continue
            total = reconstruct(dist, x, u, K)
            dev = deviation(total, p)
            if dev > worst:
                worst = dev
                worst_site = (dist.gamma, x, u)
    tol = 0 if system.backend == RATIONAL else EPS_NUM
    return GaugeReport(worst <= tol, worst, worst_site)


# -- closed forms for totally correlated two-region systems ----------------


def epr_b_working_gauge(angles):
    """Closed-form gauge set for a 2, 3 or 4 angle totally correlated pair.

    Weights live on the lifted double-plateau working set and are quarter
    sums of cosines of angle differences; the form is only valid where all
    entries are non-negative (NegativeEntry otherwise).  Distributions for
    the second region duplicate those of the first.
    """
    K = len(angles)
    if K not in (2, 3, 4):
        raise ValidationError("closed-form working gauges exist for K in {2, 3, 4}")
    c = {(a, b): math.cos(angles[b] - angles[a]) for a in range(K) for b in range(K)}

    if K == 2:
        plain = {0: 1 + c[0, 1], 1: 1 - c[0, 1], 2: 1 - c[0, 1], 3: 1 + c[0, 1]}
        per_setting = [plain, dict(plain)]
    elif K == 3:
        per_setting = [
            {0: 1 + c[0, 2], 1: 1 - c[0, 1], 3: c[0, 1] - c[0, 2],
             4: c[0, 1] - c[0, 2], 6: 1 - c[0, 1], 7: 1 + c[0, 2]},
            {0: c[0, 1] + c[1, 2], 1: 1 - c[0, 1], 3: 1 - c[1, 2],
             4: 1 - c[1, 2], 6: 1 - c[0, 1], 7: c[0, 1] + c[1, 2]},
            {0: 1 + c[0, 2], 1: c[1, 2] - c[0, 2], 3: 1 - c[1, 2],
             4: 1 - c[1, 2], 6: c[1, 2] - c[0, 2], 7: 1 + c[0, 2]},
        ]
    else:
        per_setting = [
            {0: 1 + c[0, 3], 1: 1 - c[0, 1], 3: c[0, 1] - c[0, 2], 7: c[0, 2] - c[0, 3],
             8: c[0, 2] - c[0, 3], 12: c[0, 1] - c[0, 2], 14: 1 - c[0, 1], 15: 1 + c[0, 3]},
            {0: c[0, 1] + c[1, 3], 1: 1 - c[0, 1], 3: 1 - c[1, 2], 7: c[1, 2] - c[1, 3],
             8: c[1, 2] - c[1, 3], 12: 1 - c[1, 2], 14: 1 - c[0, 1], 15: c[0, 1] + c[1, 3]},
            {0: c[0, 2] + c[2, 3], 1: c[1, 2] - c[0, 2], 3: 1 - c[1, 2], 7: 1 - c[2, 3],
             8: 1 - c[2, 3], 12: 1 - c[1, 2], 14: c[1, 2] - c[0, 2], 15: c[0, 2] + c[2, 3]},
            {0: 1 + c[0, 3], 1: c[1, 3] - c[0, 3], 3: c[2, 3] - c[1, 3], 7: 1 - c[2, 3],
             8: 1 - c[2, 3], 12: c[2, 3] - c[1, 3], 14: c[1, 3] - c[0, 3], 15: 1 + c[0, 3]},
        ]

    dists = []
    for k, raw in enumerate(per_setting):
        weights = {}
        for j_small, value in raw.items():
            w = value / 4.0
            if w < -EPS_NUM:
                raise NegativeEntry(f"setting {k}, state {j_small}", w)
            if w > 0:
                weights[bell_lift(j_small, K)] = w
        dists.append(weights)
    # Same distribution serves both regions at a given setting.
    return GaugeSet(
        tuple(
            GaugeDistribution(k + i * K, dict(dists[k]))
            for i in (0, 1)
            for k in range(K)
        )
    )


@dataclass(frozen=True)
class RegularGauge:
    """Closed-form gauge family for K evenly spaced angles k*pi/K.

    Weights and projections are indexed by the 2K double-plateau positions;
    the distribution for setting k is the base one shifted by k.
    """

    num_settings: int

    @property
    def alpha(self):
        return math.pi / (2 * self.num_settings)

    def weight(self, r, setting=0):
        # even K is offset half a step relative to the odd-K phase so that
        # the weights line up with the trigonometric plateau order
        K = self.num_settings
        r = (r - setting) % (2 * K)
        phase = (2 * r - 1) if K % 2 == 0 else (2 * r)
        return 0.5 * math.sin(self.alpha) * abs(math.cos(phase * self.alpha))

    def projection_bit(self, r, setting=0):
        K = self.num_settings
        return plateau_projection(r - setting, K)

    def weights_on_plateau(self, setting=0):
        """Weights mapped onto lifted double-plateau ignition states."""
        K = self.num_settings
        plateau = double_plateau(K)
        return {
            bell_lift(plateau[r], K): self.weight(r, setting)
            for r in range(2 * K)
            if self.weight(r, setting) > EPS_NUM
        }


def epr_regular_gauge(num_settings):
    if num_settings < 2:
        raise ValidationError("regular gauge families need K >= 2")
    return RegularGauge(num_settings)


# -- continuous settings ----------------------------------------------------


@dataclass(frozen=True)
class ContinuousGauge:
    """Gauge density (1/4)|cos(theta - lam)| on [0, 2*pi) for one setting."""

    theta: float

    def density(self, lam):
        return 0.25 * abs(math.cos(self.theta - lam))

    @staticmethod
    def projection(theta_prime, lam):
        """Square-wave outcome bit: 1 where cos(theta' - lam) >= 0."""
        return 1 if math.cos(theta_prime - lam) >= 0 else 0

    def sample(self, rng, size=None):
        """Draw lambda by piecewise-analytic inverse CDF (no tabulation)."""
        if size is None:
            return self._inverse_cdf(float(rng.random()))
        u = rng.random(size)
        out = np.empty(size, dtype=float)
        lo = u < 0.25
        mid = (u >= 0.25) & (u < 0.75)
        hi = u >= 0.75
        out[lo] = np.arcsin(4.0 * u[lo])
        out[mid] = math.pi - np.arcsin(2.0 - 4.0 * u[mid])
        out[hi] = 2.0 * math.pi + np.arcsin(4.0 * u[hi] - 4.0)
        return (out + self.theta) % (2.0 * math.pi)

    def _inverse_cdf(self, u):
        if u < 0.25:
            nu = math.asin(4.0 * u)
        elif u < 0.75:
            nu = math.pi - math.asin(2.0 - 4.0 * u)
        else:
            nu = 2.0 * math.pi + math.asin(4.0 * u - 4.0)
        return (nu + self.theta) % (2.0 * math.pi)


def continuous_gauge(theta):
    if not 0 <= theta < 2 * math.pi + EPS_NUM:
        raise ValidationError("angle must lie in [0, 2*pi)")
    return ContinuousGauge(theta)
