"""Classical collapse execution and empirical statistics.

A one-step collapse draws an ignition state from the gauge distribution of
one uniformly chosen submitted configuration and projects every region's
outcome from its bits.  A multi-step collapse first resolves some regions
one at a time from their single-region marginals, conditioning after each
draw, and finishes with a one-step collapse of the residual subsystem.
Randomness comes from a counter-based 64-bit generator (Philox), one
independently seeded stream per worker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

import numpy as np

from .errors import Infeasible, InfeasibleBranch, ValidationError
from .ignition import config_index, projection
from .model import ProbabilitySystem, condition
from .scalars import RATIONAL
from .solver import GaugeSet, continuous_gauge, solve_all_gauges


@dataclass(frozen=True)
class LeadingRegion:
    """Plan step: draw one region from its marginal, then condition on it."""

    region: int


@dataclass(frozen=True)
class FinalGauge:
    """Plan step: one-step gauge collapse of whatever regions remain."""


@dataclass(frozen=True)
class CollapsePlan:
    """Ordered steps: distinct leading regions, one final gauge stage last."""

    steps: tuple

    def __post_init__(self):
        if not self.steps or not isinstance(self.steps[-1], FinalGauge):
            raise ValidationError("a plan ends with exactly one final gauge stage")
        leaders = [s for s in self.steps[:-1]]
        if any(not isinstance(s, LeadingRegion) for s in leaders):
            raise ValidationError("only leading-region steps may precede the final stage")
        regions = [s.region for s in leaders]
        if len(set(regions)) != len(regions):
            raise ValidationError("leading regions must be distinct")

    @property
    def leaders(self):
        return tuple(s.region for s in self.steps[:-1])

    @property
    def num_steps(self):
        return len(self.steps)

    @classmethod
    def one_step(cls):
        return cls((FinalGauge(),))

    @classmethod
    def leading(cls, regions):
        return cls(tuple(LeadingRegion(r) for r in regions) + (FinalGauge(),))

    @classmethod
    def parse(cls, text):
        """Parse '2,final' style CLI plans; 'final' alone is the one-step plan."""
        steps = []
        for part in str(text).split(","):
            part = part.strip().lower()
            if part == "final":
                steps.append(FinalGauge())
            else:
                steps.append(LeadingRegion(int(part)))
        return cls(tuple(steps))


@dataclass
class TraceStep:
    kind: str  # "lead" or "gauge"
    detail: dict


@dataclass
class CollapseTrace:
    steps: list = field(default_factory=list)
    outcome: tuple = ()

    def record(self, kind, **detail):
        self.steps.append(TraceStep(kind, detail))

    def as_dict(self):
        return {
            "steps": [{"kind": s.kind, **s.detail} for s in self.steps],
            "outcome": list(self.outcome),
        }


class EmpiricalTable:
    """Outcome counts per setting vector."""

    def __init__(self):
        self.counts = {}
        self.total = {}

    def add(self, u, x, amount=1):
        per_u = self.counts.setdefault(tuple(u), {})
        per_u[tuple(x)] = per_u.get(tuple(x), 0) + amount
        self.total[tuple(u)] = self.total.get(tuple(u), 0) + amount

    def frequency(self, u, x):
        u = tuple(u)
        n = self.total.get(u, 0)
        if n == 0:
            return 0.0
        return self.counts[u].get(tuple(x), 0) / n

    def tv_distance(self, system, u):
        """Total variation distance between frequencies and P(.|u)."""
        u = tuple(system.setting_index(s) for s in u)
        return 0.5 * sum(
            abs(self.frequency(u, x) - float(system.prob(x, u)))
            for x in system.outcome_vectors()
        )

    def merge(self, other):
        for u, per_u in other.counts.items():
            for x, c in per_u.items():
                self.add(u, x, c)
        return self

    def as_dict(self):
        return {
            "counts": [
                {
                    "u": list(u),
                    "outcomes": {"".join(map(str, x)): c for x, c in sorted(per_u.items())},
                    "runs": self.total[u],
                }
                for u, per_u in sorted(self.counts.items())
            ]
        }


def make_rng(seed, stream=0):
    """Counter-based generator; distinct streams are statistically independent."""
    seq = np.random.SeedSequence(seed)
    if stream:
        seq = seq.spawn(stream + 1)[stream]
    return np.random.Generator(np.random.Philox(seq))


def _draw(weights, rng):
    """Draw a key from a weight mapping (deterministic key order)."""
    keys = sorted(weights)
    cumulative = []
    acc = 0.0
    for k in keys:
        acc += float(weights[k])
        cumulative.append(acc)
    r = float(rng.random()) * acc
    for k, c in zip(keys, cumulative):
        if r < c:
            return k
    return keys[-1]


def one_step_run(system, gauges, u, rng, force_gamma=None):
    """Single collapse: uniform gauge choice, one ignition draw, projection."""
    K = system.num_settings
    u = tuple(system.setting_index(s) for s in u)
    candidates = [config_index(i, u[i], K) for i in range(system.n)]
    if force_gamma is None:
        gamma = candidates[int(rng.integers(0, len(candidates)))]
    else:
        if force_gamma not in candidates:
            raise ValidationError(
                f"configuration {force_gamma} is not submitted under settings {u}"
            )
        gamma = force_gamma
    dist = gauges.by_gamma(gamma)
    j = _draw(dist.weights, rng)
    x = tuple(projection(g, j) for g in candidates)
    trace = CollapseTrace()
    trace.record("gauge", gamma=gamma, ignition=j)
    trace.outcome = x
    return x, trace


class GaugeCache:
    """Memoized one-step gauge sets keyed by the system's canonical table."""

    def __init__(self):
        self._cache = {}

    def get(self, system):
        key = system.canonical_key()
        if key not in self._cache:
            self._cache[key] = solve_all_gauges(system)
        return self._cache[key]

    def feasible(self, system):
        try:
            self.get(system)
            return True
        except Infeasible:
            return False


def multi_step_run(system, plan, u, rng, cache=None, force_gamma=None):
    """Cascaded collapse following a plan; leading draws then a gauge stage."""
    cache = cache or GaugeCache()
    u = tuple(system.setting_index(s) for s in u)
    current = system
    remaining = list(range(system.n))
    outcome = [None] * system.n
    trace = CollapseTrace()

    for step_no, step in enumerate(plan.steps[:-1]):
        region = step.region
        if region not in remaining:
            raise ValidationError(f"leading region {region} already resolved")
        pos = remaining.index(region)
        setting = u[region]
        marg = current.region_marginal(pos, setting)
        p0 = float(marg[0])
        xi = 0 if float(rng.random()) < p0 else 1
        outcome[region] = xi
        trace.record("lead", region=region, setting=setting, outcome=xi)
        try:
            current = condition(current, pos, setting, xi).system
        except ValidationError as exc:
            raise InfeasibleBranch(step_no, str(exc)) from exc
        remaining.pop(pos)

    residual_u = tuple(u[r] for r in remaining)
    try:
        gauges = cache.get(current)
    except Infeasible as exc:
        raise InfeasibleBranch(plan.num_steps - 1, str(exc)) from exc
    x_res, sub = one_step_run(current, gauges, residual_u, rng, force_gamma=force_gamma)
    for r, xi in zip(remaining, x_res):
        outcome[r] = xi
    trace.steps.extend(sub.steps)
    trace.outcome = tuple(outcome)
    return trace.outcome, trace


def plan_joint_probability(system, plan, u, x):
    """Exact joint law of a plan: product of branch laws.

    Multiplies each leading region's marginal by the conditioned residual
    probability; equals P(x|u) for valid systems (checked symbolically in
    tests, independent of any sampling).
    """
    u = tuple(system.setting_index(s) for s in u)
    x = tuple(x)
    current = system
    remaining = list(range(system.n))
    acc = Fraction(1) if system.backend == RATIONAL else 1.0
    for step in plan.steps[:-1]:
        region = step.region
        pos = remaining.index(region)
        prob = current.region_marginal(pos, u[region])[x[region]]
        if prob == 0:
            return prob  # branch never taken; joint probability is zero
        acc *= prob
        current = condition(current, pos, u[region], x[region]).system
        remaining.pop(pos)
    residual_u = tuple(u[r] for r in remaining)
    residual_x = tuple(x[r] for r in remaining)
    return acc * current.prob(residual_x, residual_u)


@dataclass
class StepCertificate:
    """Minimal feasible step count with its plan and per-branch gauge sets."""

    steps: int
    plan: CollapsePlan
    branch_gauges: dict  # conditioning chain tuple -> GaugeSet

    def as_dict(self):
        return {
            "steps": self.steps,
            "leaders": list(self.plan.leaders),
            "branches": {
                "/".join(f"r{r}k{k}x{x}" for r, k, x in chain) or "root": [
                    d.to_dict() for d in gauges
                ]
                for chain, gauges in self.branch_gauges.items()
            },
        }


def find_min_steps(system, cache=None):
    """Smallest m admitting an m-step collapse, with a feasibility certificate.

    Leading-region orders are explored depth-first (lexicographic), and
    gauge feasibility of conditioned subsystems is memoized on their
    canonical tables.  Any n-region system collapses in at most n steps.
    """
    cache = cache or GaugeCache()
    n, K = system.n, system.num_settings

    def branches(current, leaders, chain, collected):
        """True when every reachable branch admits a one-step final stage."""
        if not leaders:
            try:
                collected[chain] = cache.get(current)
                return True
            except Infeasible:
                return False
        head, rest = leaders[0], leaders[1:]
        pos = [r for r in range(system.n) if r not in [c[0] for c in chain]].index(head)
        for setting in range(K):
            for outcome in (0, 1):
                prob = current.region_marginal(pos, setting)[outcome]
                if float(prob) <= 0:
                    continue
                branch = condition(current, pos, setting, outcome).system
                if not branches(branch, rest, chain + ((head, setting, outcome),), collected):
                    return False
        return True

    for m in range(1, n + 1):
        if m == 1:
            collected = {}
            if branches(system, (), (), collected):
                return StepCertificate(1, CollapsePlan.one_step(), collected)
            continue
        for leaders in permutations(range(n), m - 1):
            collected = {}
            if branches(system, leaders, (), collected):
                return StepCertificate(m, CollapsePlan.leading(leaders), collected)
    raise AssertionError("an n-region system always collapses in n steps")


def simulate(system, u, runs, seed, gauges=None, plan=None, force_gamma=None,
             streams=1, cache=None):
    """Monte-Carlo collapse harness returning empirical outcome counts.

    With a gauge set (or a solvable system) the one-step path is vectorized;
    a plan switches to per-run cascaded draws.  `streams` splits the work
    into independently seeded substreams whose counts merge associatively.
    """
    if runs < 1:
        raise ValidationError("runs must be at least 1")
    u_idx = tuple(system.setting_index(s) for s in u)
    table = EmpiricalTable()

    if plan is not None and plan.leaders:
        cache = cache or GaugeCache()
        for stream in range(streams):
            rng = make_rng(seed, stream)
            for _ in range(_chunk(runs, streams, stream)):
                x, _trace = multi_step_run(system, plan, u_idx, rng, cache,
                                           force_gamma=force_gamma)
                table.add(u_idx, x)
        return table

    if gauges is None:
        gauges = solve_all_gauges(system)
    n, K = system.n, system.num_settings
    candidates = [config_index(i, u_idx[i], K) for i in range(n)]
    per_gamma = {}
    for gamma in candidates:
        dist = gauges.by_gamma(gamma)
        support = np.array(sorted(dist.weights), dtype=np.int64)
        w = np.array([float(dist.weights[j]) for j in sorted(dist.weights)])
        per_gamma[gamma] = (support, np.cumsum(w) / w.sum())

    for stream in range(streams):
        rng = make_rng(seed, stream)
        size = _chunk(runs, streams, stream)
        if size == 0:
            continue
        if force_gamma is not None:
            if force_gamma not in candidates:
                raise ValidationError(f"configuration {force_gamma} not submitted")
            chosen = np.full(size, candidates.index(force_gamma))
        else:
            chosen = rng.integers(0, n, size)
        draws = np.empty(size, dtype=np.int64)
        for idx, gamma in enumerate(candidates):
            mask = chosen == idx
            count = int(mask.sum())
            if count == 0:
                continue
            support, cdf = per_gamma[gamma]
            picks = np.searchsorted(cdf, rng.random(count), side="right")
            draws[mask] = support[np.minimum(picks, len(support) - 1)]
        bits = np.zeros((size, n), dtype=np.int8)
        for i, gamma in enumerate(candidates):
            bits[:, i] = (draws >> gamma) & 1
        encoded = np.zeros(size, dtype=np.int64)
        for i in range(n):
            encoded = encoded * 2 + bits[:, i]
        values, counts = np.unique(encoded, return_counts=True)
        for value, count in zip(values, counts):
            x = tuple((int(value) >> (n - 1 - i)) & 1 for i in range(n))
            table.add(u_idx, x, int(count))
    return table


def _chunk(runs, streams, stream):
    base = runs // streams
    return base + (1 if stream < runs % streams else 0)


def simulate_continuous(theta_pair, runs, seed, force_setting=None, streams=1):
    """Sampled two-region collapse for continuous settings.

    Draws the ignition angle from the gauge density of one of the two
    submitted settings (uniformly chosen unless forced) and projects both
    outcomes with the square-wave projection.
    """
    theta_a, theta_b = float(theta_pair[0]), float(theta_pair[1])
    table = EmpiricalTable()
    base = continuous_gauge(0.0)
    for stream in range(streams):
        rng = make_rng(seed, stream)
        size = _chunk(runs, streams, stream)
        if size == 0:
            continue
        if force_setting is None:
            igni = rng.integers(0, 2, size)
        else:
            igni = np.full(size, int(force_setting))
        theta_igni = np.where(igni == 0, theta_a, theta_b)
        nu = base.sample(rng, size)  # base density around 0; shift per run
        lam = (nu + theta_igni) % (2.0 * math.pi)
        x0 = (np.cos(theta_a - lam) >= 0).astype(int)
        x1 = (np.cos(theta_b - lam) >= 0).astype(int)
        encoded = x0 * 2 + x1
        values, counts = np.unique(encoded, return_counts=True)
        for value, count in zip(values, counts):
            table.add((theta_a, theta_b), (int(value) // 2, int(value) % 2), int(count))
    return table


def continuous_probability(theta_a, theta_b, x0, x1):
    """Closed-form target law of the continuous totally correlated pair."""
    c = math.cos(theta_a - theta_b)
    return 0.25 * (1.0 + c) if x0 == x1 else 0.25 * (1.0 - c)
