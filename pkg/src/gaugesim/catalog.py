"""Parameterized constructors for the standard example systems.

Each catalog entry builds a validated probability system and, where a
reference gauge working set is known, bundles it as a regression fixture.
Fixtures are kept separate from solver output: the gauge linear systems are
degenerate, so the solver is free to return a different feasible vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import ConstraintViolation, NegativeEntry, RangeError, ValidationError
from .ignition import bell_lift
from .model import ProbabilitySystem
from .solver import ContinuousGauge, GaugeDistribution, GaugeSet, continuous_gauge

F = Fraction


def one_region(probs):
    """Single-region system with one Bernoulli outcome per setting."""
    probs = [F(p) if not isinstance(p, float) else p for p in probs]
    for k, p in enumerate(probs):
        if not 0 <= p <= 1:
            raise RangeError(f"probability for setting {k} out of [0, 1]: {p}")
    K = len(probs)
    table = {}
    for k in range(K):
        table[((0,), (k,))] = probs[k]
        table[((1,), (k,))] = 1 - probs[k]
    return ProbabilitySystem(1, K, [f"t{k}" for k in range(K)], table)


def one_region_reference_gauges(probs):
    """Two-state working set: all-zero and all-one ignition states."""
    K = len(probs)
    top = (1 << K) - 1
    dists = []
    for k in range(K):
        p = F(probs[k]) if not isinstance(probs[k], float) else probs[k]
        weights = {}
        if p > 0:
            weights[0] = p
        if p < 1:
            weights[top] = 1 - p
        dists.append(GaugeDistribution(k, weights))
    return GaugeSet(tuple(dists))


def general_bell2(q1, q2, q3, q4):
    """General locally consistent, totally correlated 2-region, 2-setting system."""
    q1, q2, q3, q4 = F(q1), F(q2), F(q3), F(q4)
    for name, q in (("q1", q1), ("q2", q2), ("q3", q3), ("q4", q4)):
        if not 0 <= q <= 1:
            raise ConstraintViolation(f"0 <= {name} <= 1", f"{name} = {q}")
    for name, q in (("q3", q3), ("q4", q4)):
        if q < q1 or q < q2:
            raise ConstraintViolation(f"{name} >= q1, q2", f"{name} = {q}")
        if q1 + q2 < q:
            raise ConstraintViolation(f"q1 + q2 >= {name}", f"{name} = {q}")

    def cell(x, u):
        if u[0] == u[1]:
            qd = (q1, q2)[u[0]]
            if x == (0, 0):
                return 1 - qd
            if x == (1, 1):
                return qd
            return F(0)
        qd = q3 if u == (0, 1) else q4
        qa, qb = (q1, q2) if u == (0, 1) else (q2, q1)
        if x == (0, 0):
            return 1 - qd
        if x == (0, 1):
            return qd - qa
        if x == (1, 0):
            return qd - qb
        return q1 + q2 - qd

    table = {
        (x, u): cell(x, u)
        for u in product(range(2), repeat=2)
        for x in product((0, 1), repeat=2)
    }
    return ProbabilitySystem(2, 2, ("t0", "t1"), table)


def general_bell2_reference_gauges(q1, q2, q3, q4):
    """Closed-form working set on the four lifted 2-bit ignition states.

    Region 1's distributions are those of the region-swapped system, which
    exchanges the two off-diagonal parameters; for symmetric tables
    (q3 == q4) all four distributions coincide.
    """
    q1, q2, q3, q4 = F(q1), F(q2), F(q3), F(q4)

    def family(qd):
        return {0: 1 - qd, 1: qd - q2, 2: qd - q1, 3: q1 + q2 - qd}

    by_gamma = {0: family(q3), 1: family(q4), 2: family(q4), 3: family(q3)}
    dists = []
    for gamma, raw in by_gamma.items():
        weights = {bell_lift(j, 2): w for j, w in raw.items() if w > 0}
        dists.append(GaugeDistribution(gamma, weights))
    return GaugeSet(tuple(dists))


def general_bipartite2(q1, q2, q3, q4, q5, q6, q7, q8):
    """General locally consistent 2-region, 2-setting system (8 parameters)."""
    q = [None] + [F(v) for v in (q1, q2, q3, q4, q5, q6, q7, q8)]
    cells = {
        ((0, 0), (0, 0)): 1 - q[1],
        ((0, 1), (0, 0)): q[5],
        ((1, 0), (0, 0)): q[7],
        ((1, 1), (0, 0)): q[1] - q[5] - q[7],
        ((0, 0), (1, 1)): 1 - q[2],
        ((0, 1), (1, 1)): q[6],
        ((1, 0), (1, 1)): q[8],
        ((1, 1), (1, 1)): q[2] - q[6] - q[8],
        ((0, 0), (0, 1)): 1 - q[3],
        ((0, 1), (0, 1)): q[3] - q[1] + q[5],
        ((1, 0), (0, 1)): q[3] - q[2] + q[8],
        ((1, 1), (0, 1)): q[1] + q[2] - q[3] - q[5] - q[8],
        ((0, 0), (1, 0)): 1 - q[4],
        ((0, 1), (1, 0)): q[4] - q[2] + q[6],
        ((1, 0), (1, 0)): q[4] - q[1] + q[7],
        ((1, 1), (1, 0)): q[1] + q[2] - q[4] - q[6] - q[7],
    }
    for (x, u), p in cells.items():
        if p < 0:
            raise NegativeEntry(f"P{x}|{u}", p)
    return ProbabilitySystem(2, 2, ("t0", "t1"), cells)


def epr_b(angles):
    """Totally correlated pair with cosine-law targets at the given angles."""
    K = len(angles)
    if K < 2:
        raise ValidationError("need at least two settings")
    angles = [float(a) for a in angles]
    table = {}
    for u in product(range(K), repeat=2):
        c = math.cos(angles[u[0]] - angles[u[1]])
        for x in product((0, 1), repeat=2):
            table[(x, u)] = 0.25 * (1 + c) if x[0] == x[1] else 0.25 * (1 - c)
    return ProbabilitySystem(2, K, [f"t{k}" for k in range(K)], table)


def epr_b_regular(num_settings):
    """Evenly spaced angles k*pi/K."""
    K = int(num_settings)
    return epr_b([k * math.pi / K for k in range(K)])


@dataclass(frozen=True)
class ContinuousEprB:
    """Sampler-backed totally correlated pair over the continuous circle."""

    def probability(self, x0, x1, theta_a, theta_b):
        c = math.cos(theta_a - theta_b)
        return 0.25 * (1 + c) if x0 == x1 else 0.25 * (1 - c)

    def gauge(self, theta):
        return continuous_gauge(theta % (2 * math.pi))

    def simulate(self, theta_pair, runs, seed, force_setting=None):
        from .collapse import simulate_continuous

        return simulate_continuous(theta_pair, runs, seed, force_setting)


def epr_b_continuous():
    return ContinuousEprB()


def singlet():
    """Two regions, three settings; opposite outcomes certain on equal settings."""
    table = {}
    for u in product(range(3), repeat=2):
        for x in product((0, 1), repeat=2):
            if u[0] == u[1]:
                table[(x, u)] = F(1, 2) if x[0] != x[1] else F(0)
            else:
                table[(x, u)] = F(1, 4)
    return ProbabilitySystem(2, 3, ("X", "Y", "Z"), table)


def singlet_reference_gauges():
    """Four equally likely ignition states shared by all six configurations."""
    weights = {7: F(1, 4), 28: F(1, 4), 42: F(1, 4), 49: F(1, 4)}
    return GaugeSet(
        tuple(GaugeDistribution(g, dict(weights)) for g in range(6))
    )


def pr_box():
    """Nonsignaling box: outcomes agree except when both regions pick setting 1."""
    table = {}
    for u in product(range(2), repeat=2):
        agree = u != (1, 1)
        for x in product((0, 1), repeat=2):
            hit = (x[0] == x[1]) if agree else (x[0] != x[1])
            table[(x, u)] = F(1, 2) if hit else F(0)
    return ProbabilitySystem(2, 2, ("t0", "t1"), table)


def pr_box_reference_gauges():
    plan = {0: {0: F(1, 2), 15: F(1, 2)}, 1: {6: F(1, 2), 9: F(1, 2)}}
    return GaugeSet(
        tuple(
            GaugeDistribution(k + 2 * i, dict(plan[k]))
            for i in (0, 1)
            for k in (0, 1)
        )
    )


def ghz_xy():
    """Three-region GHZ correlations restricted to two transverse settings."""
    table = {}
    for u in product(range(2), repeat=3):
        for x in product((0, 1), repeat=3):
            if sum(u) % 2 == 1:
                table[(x, u)] = F(1, 8)
            else:
                want = (sum(u) // 2) % 2
                table[(x, u)] = F(1, 4) if sum(x) % 2 == want else F(0)
    return ProbabilitySystem(3, 2, ("X", "Y"), table)


GHZ_XY_GAUGE_SUPPORTS = {
    0: (7, 8, 17, 28, 32, 45, 52, 57),
    1: (3, 13, 20, 26, 38, 40, 48, 62),
    2: (2, 13, 20, 27, 32, 39, 49, 54),
    3: (7, 12, 17, 26, 34, 41, 48, 59),
    4: (2, 7, 8, 13, 17, 20, 27, 30),
    5: (3, 5, 10, 28, 32, 38, 41, 47),
}


def ghz_xy_reference_gauges():
    """Reference 29-state working set, eight states of weight 1/8 per gauge."""
    return GaugeSet(
        tuple(
            GaugeDistribution(g, {j: F(1, 8) for j in js})
            for g, js in GHZ_XY_GAUGE_SUPPORTS.items()
        )
    )


def w_xy():
    """Three-region W correlations restricted to two transverse settings.

    For a constant setting vector the three outcomes agree with weight 3/8;
    otherwise the unique same-setting pair of regions carries the excess.
    """
    table = {}
    for u in product(range(2), repeat=3):
        constant = len(set(u)) == 1
        if not constant:
            pair = [
                (a, b)
                for a, b in ((0, 1), (0, 2), (1, 2))
                if u[a] == u[b]
            ][0]
        for x in product((0, 1), repeat=3):
            if constant:
                table[(x, u)] = F(3, 8) if len(set(x)) == 1 else F(1, 24)
            else:
                table[(x, u)] = F(5, 24) if x[pair[0]] == x[pair[1]] else F(1, 24)
    return ProbabilitySystem(3, 2, ("X", "Y"), table)


W_XY_GAUGE_TABLE = {
    0: {0: (1, 6), 20: (1, 24), 21: (5, 24), 24: (1, 24), 25: (1, 24),
        36: (1, 24), 37: (1, 24), 40: (5, 24), 41: (1, 24), 61: (1, 6)},
    1: {0: (1, 6), 20: (5, 24), 22: (1, 24), 24: (1, 24), 26: (1, 24),
        36: (1, 24), 38: (1, 24), 40: (1, 24), 42: (5, 24), 62: (1, 6)},
    2: {0: (1, 6), 17: (1, 24), 18: (1, 24), 21: (5, 24), 22: (1, 24),
        33: (1, 24), 34: (5, 24), 37: (1, 24), 38: (1, 24), 55: (1, 6)},
    3: {0: (1, 6), 17: (5, 24), 18: (1, 24), 25: (1, 24), 26: (1, 24),
        33: (1, 24), 34: (1, 24), 41: (1, 24), 42: (5, 24), 59: (1, 6)},
    4: {0: (1, 6), 2: (1, 24), 5: (1, 24), 9: (1, 24), 10: (1, 6),
        14: (1, 24), 21: (5, 24), 22: (1, 24), 25: (1, 24), 26: (1, 24),
        31: (1, 6)},
    5: {0: (1, 6), 5: (5, 24), 9: (1, 24), 22: (1, 24), 26: (1, 24),
        37: (1, 24), 38: (1, 24), 41: (1, 24), 42: (5, 24), 47: (1, 6)},
}


def w_xy_reference_gauges():
    """Reference 28-state working set for the two-setting W system."""
    return GaugeSet(
        tuple(
            GaugeDistribution(g, {j: F(a, b) for j, (a, b) in tbl.items()})
            for g, tbl in W_XY_GAUGE_TABLE.items()
        )
    )


def ghz_zzz():
    """GHZ correlations along the shared entanglement axis (one setting)."""
    table = {}
    for x in product((0, 1), repeat=3):
        p = F(1, 2) if len(set(x)) == 1 else F(0)
        table[(x, (0, 0, 0))] = p
    return ProbabilitySystem(3, 1, ("Z",), table)


def w_zzz():
    """W correlations along the shared axis: one excited region out of three."""
    table = {}
    for x in product((0, 1), repeat=3):
        p = F(1, 3) if sum(x) == 1 else F(0)
        table[(x, (0, 0, 0))] = p
    return ProbabilitySystem(3, 1, ("Z",), table)


def super_ghz():
    """Setting-symmetric GHZ-like system exceeding the quantum ceiling."""
    return quasi_super_ghz(F(0))


def quasi_super_ghz(eps):
    """Super-GHZ with zeros replaced by eps and quarters by 1/4 - eps."""
    eps = F(eps) if not isinstance(eps, float) else F(eps).limit_denominator(10**9)
    if not 0 <= eps <= F(1, 4):
        raise RangeError(f"eps must lie in [0, 1/4], got {eps}")
    table = {}
    for u in product(range(2), repeat=3):
        aligned = 1 if len(set(u)) == 1 else 0
        for x in product((0, 1), repeat=3):
            mismatch = (sum(x) % 2) != aligned
            table[(x, u)] = eps if mismatch else F(1, 4) - eps
    return ProbabilitySystem(3, 2, ("t0", "t1"), table)


SUPER_GHZ_STEP2_GAUGES = {
    # second-step gauge tables after collapsing region 2 with outcome 0
    0: {0: {4: (1, 2), 11: (1, 2)}, 1: {1: (1, 2), 14: (1, 2)},
        2: {1: (1, 2), 14: (1, 2)}, 3: {4: (1, 2), 11: (1, 2)}},
    1: {0: {2: (1, 2), 13: (1, 2)}, 1: {7: (1, 2), 8: (1, 2)},
        2: {7: (1, 2), 8: (1, 2)}, 3: {2: (1, 2), 13: (1, 2)}},
}


def super_ghz_step2_gauges(setting):
    """Reference working sets for the residual pair after a region-2 draw."""
    plan = SUPER_GHZ_STEP2_GAUGES[setting]
    return GaugeSet(
        tuple(
            GaugeDistribution(g, {j: F(a, b) for j, (a, b) in tbl.items()})
            for g, tbl in plan.items()
        )
    )


@dataclass(frozen=True)
class CatalogEntry:
    """Named constructor with a parameter schema and optional fixtures."""

    name: str
    summary: str
    build: callable
    params: dict = field(default_factory=dict)  # name -> (default, parser)
    reference_gauges: callable = None  # (**params) -> GaugeSet

    def make(self, **overrides):
        kwargs = {}
        for pname, (default, parser) in self.params.items():
            raw = overrides.pop(pname, default)
            kwargs[pname] = parser(raw) if isinstance(raw, str) else raw
        if overrides:
            raise ValidationError(f"unknown parameters {sorted(overrides)}")
        return self.build(**kwargs)


def _parse_fraction_list(text):
    return [F(part.strip()) for part in text.split(",")]


def _parse_float_list(text):
    return [float(part.strip()) for part in text.split(",")]


def _entries():
    return [
        CatalogEntry(
            "one-region",
            "single region, one Bernoulli outcome per setting",
            lambda probs: one_region(probs),
            {"probs": ("1/2,1/2,1/2,1/2,1/2", _parse_fraction_list)},
            lambda probs: one_region_reference_gauges(_listify(probs)),
        ),
        CatalogEntry(
            "bell2",
            "general totally correlated 2-region, 2-setting system",
            general_bell2,
            {"q1": ("1/2", F), "q2": ("1/2", F), "q3": ("3/4", F), "q4": ("3/4", F)},
            lambda q1, q2, q3, q4: general_bell2_reference_gauges(q1, q2, q3, q4),
        ),
        CatalogEntry(
            "bipartite2",
            "general locally consistent 2-region, 2-setting system",
            general_bipartite2,
            {
                "q1": ("1/2", F), "q2": ("1", F), "q3": ("1/2", F), "q4": ("1/2", F),
                "q5": ("0", F), "q6": ("1/2", F), "q7": ("0", F), "q8": ("1/2", F),
            },
        ),
        CatalogEntry(
            "epr-b",
            "totally correlated pair with cosine-law targets",
            epr_b,
            {"angles": ("0,0.6283185307179586,1.5707963267948966", _parse_float_list)},
        ),
        CatalogEntry(
            "epr-b-regular",
            "totally correlated pair at K evenly spaced angles",
            lambda k: epr_b_regular(k),
            {"k": ("3", int)},
        ),
        CatalogEntry("singlet", "isotropic opposite pair, three settings",
                      singlet, {}, singlet_reference_gauges),
        CatalogEntry("pr-box", "nonsignaling box exceeding the quantum ceiling",
                      pr_box, {}, pr_box_reference_gauges),
        CatalogEntry("ghz-xy", "tripartite GHZ with two transverse settings",
                      ghz_xy, {}, ghz_xy_reference_gauges),
        CatalogEntry("w-xy", "tripartite W with two transverse settings",
                      w_xy, {}, w_xy_reference_gauges),
        CatalogEntry("ghz-zzz", "tripartite GHZ along the entanglement axis",
                      ghz_zzz, {}),
        CatalogEntry("w-zzz", "tripartite W along the entanglement axis",
                      w_zzz, {}),
        CatalogEntry("super-ghz", "setting-symmetric super-quantum GHZ",
                      super_ghz, {}),
        CatalogEntry(
            "quasi-super-ghz",
            "super-GHZ smoothed by eps; tunes between regimes",
            quasi_super_ghz,
            {"eps": ("1/16", F)},
        ),
    ]


def _listify(value):
    return list(value)


REGISTRY = {entry.name: entry for entry in _entries()}


def names():
    return sorted(REGISTRY)


def get(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValidationError(f"unknown catalog system {name!r}") from None


def build(name, **params):
    return get(name).make(**params)
