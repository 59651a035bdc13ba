"""MMS allocations of chores that may leave a bounded set unassigned.

The monotone sampler mirrors the goods one: each agent draws a uniform
block of their own share-inducing partition, and a draw is accepted
when the number of chores nobody drew is at most the exact expectation
floor(m (1-1/n)^n).  Chores drawn by several agents are deduplicated by
keeping the lowest-index holder (dropping chores never raises a cost),
so returned multi-allocations always have linf <= 1.

For identically ordered instances the pipeline first runs a greedy
pre-assignment round (agents whose partition still has a block crowding
the remaining chores take that block and leave), then samples the
survivors, gates the draw on its coverage deficit, and repairs the
unassigned chores with the deterministic swap pass in
``redistribute_chores``.

``trim_additive_chores`` is the exact route for additive costs: a
brute-force min-max cost-ratio allocation (always within 11/9 of the
shares) trimmed down by removing the ceil(2k/11) costliest chores of
each bundle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import kernels
from .core import (
    CHORES, Additive, Bundle, Instance, MmsProfile, MultiAllocation, TOL,
    char_vector, check_identically_ordered,
)
from .errors import (
    BudgetExceeded, PreconditionViolated, RatioAssertionFailed,
    RetriesExhausted,
)
from .goods import SamplerConfig, draw_uniform_blocks
from .rng import stream

__all__ = [
    "SubInstance", "CoverageReport", "ChoresSampleResult", "TrimResult",
    "monotone_l0_limit", "delta_star", "sample_monotone_chores",
    "preprocess_chores", "coverage_deficit", "redistribute_chores",
    "ordered_chores_pipeline", "brute_force_minmax_ratio",
    "trim_additive_chores", "dedupe_keep_lowest",
]

RATIO_BOUND = 11.0 / 9.0


def monotone_l0_limit(n: int, m: int) -> int:
    """floor(m (1 - 1/n)^n), computed exactly in integers."""
    return (m * (n - 1) ** n) // n ** n


def delta_star(n: int, m: int) -> float:
    """Coverage-deficit gate 3 m (log2 m)^(3/2) / n^(1/4) of the ordered
    pipeline; far above m at desk scale, so it is reported, not binding."""
    return 3.0 * m * math.log2(m) ** 1.5 / n ** 0.25


@dataclass(frozen=True)
class SubInstance:
    """What is left after pre-assignment: the agents still in play, the
    chores still unallocated (sorted), and the removed agents' bundles."""

    remaining_agents: tuple[int, ...]
    remaining_chores: Bundle
    pre_bundles: tuple[tuple[int, Bundle], ...]

    def pre_bundle(self, agent: int) -> Bundle | None:
        for a, b in self.pre_bundles:
            if a == agent:
                return b
        return None


@dataclass(frozen=True)
class CoverageReport:
    """Worst interval shortfall of a copy-count sequence.

    delta_max = max(0, max over contiguous intervals of |S| - sum chi);
    witness is the raw argmax interval as inclusive positions into the
    sequence handed in (None for an empty sequence).
    """

    delta_max: int
    witness: tuple[int, int] | None


@dataclass(frozen=True)
class ChoresSampleResult:
    alloc: MultiAllocation
    retries: int
    l0_limit: int | None = None
    deficit: int | None = None
    delta_star: float | None = None
    preassigned: tuple[int, ...] = ()


@dataclass(frozen=True)
class TrimResult:
    alloc: MultiAllocation
    removed: tuple[Bundle, ...]
    ratio: float
    trimmed_counts: tuple[int, ...]


def dedupe_keep_lowest(bundles: Sequence[Sequence[int]]) -> tuple[Bundle, ...]:
    """Drop repeated chores, keeping the lowest-index holder's copy."""
    seen: set[int] = set()
    out = []
    for b in bundles:
        kept = [g for g in sorted(b) if g not in seen]
        seen.update(kept)
        out.append(tuple(kept))
    return tuple(out)


def sample_monotone_chores(instance: Instance, profile: MmsProfile,
                           cfg: SamplerConfig) -> ChoresSampleResult:
    """Rejection-sample a chores multi-allocation leaving at most
    floor(m (1-1/n)^n) chores unassigned; every bundle is (a subset of) a
    block of its agent's inducing partition, hence costs at most mu_i."""
    n, m = instance.n, instance.m
    limit = monotone_l0_limit(n, m)
    max_retries = cfg.retries_for(m)
    for trial in range(max_retries):
        alloc = draw_uniform_blocks(profile, stream(cfg.seed, trial))
        if char_vector(alloc, m).l0 <= limit:
            deduped = MultiAllocation(bundles=dedupe_keep_lowest(alloc.bundles))
            assert char_vector(deduped, m).linf <= 1
            return ChoresSampleResult(alloc=deduped, retries=trial,
                                      l0_limit=limit)
    raise RetriesExhausted(max_retries, "chores l0 gate never passed")


def preprocess_chores(instance: Instance, profile: MmsProfile,
                      alpha: float) -> SubInstance:
    """Greedy pre-assignment round: while some agent i has a block whose
    live part holds at least an alpha |U| / |N| fraction of the remaining
    chores U, the lowest such (i, block) fires: agent i takes the live
    part and leaves.  Removed agents' bundles cost at most mu_i."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n, m = instance.n, instance.m
    live = set(range(m))
    remaining = list(range(n))
    pre: list[tuple[int, Bundle]] = []
    while live and remaining:
        threshold = alpha * len(live) / len(remaining)
        fired = None
        for i in remaining:
            for block in profile.inducing[i]:
                if len(live.intersection(block)) >= threshold:
                    fired = (i, block)
                    break
            if fired:
                break
        if fired is None:
            break
        i, block = fired
        bundle = tuple(sorted(live.intersection(block)))
        assert instance.value(i, bundle) <= profile.mu[i] + TOL
        pre.append((i, bundle))
        remaining.remove(i)
        live.difference_update(block)
    if alpha >= math.log2(m) - TOL:
        bound = n * (1.0 - math.log2(m) / alpha)
        assert len(remaining) >= bound - TOL, \
            f"only {len(remaining)} agents remain, bound is {bound}"
    return SubInstance(remaining_agents=tuple(remaining),
                       remaining_chores=tuple(sorted(live)),
                       pre_bundles=tuple(pre))


def coverage_deficit(chi: Sequence[int]) -> CoverageReport:
    """Single scan for the worst interval shortfall.

    With prefix sums P of (chi - 1), an interval [s..e] falls short by
    P[s] - P[e+1]; tracking the running prefix max gives the answer in
    O(k) (tests cross-check against the quadratic enumeration).
    """
    k = len(chi)
    if k == 0:
        return CoverageReport(delta_max=0, witness=None)
    best = None
    best_iv = (0, 0)
    prefix = 0
    max_prefix = 0  # max over P[0..e] of prefix sums
    max_at = 0
    for e in range(k):
        prefix += chi[e] - 1
        val = max_prefix - prefix
        if best is None or val > best:
            best, best_iv = val, (max_at, e)
        if prefix > max_prefix:
            max_prefix, max_at = prefix, e + 1
    return CoverageReport(delta_max=max(0, best), witness=best_iv)


def redistribute_chores(alloc: MultiAllocation, instance: Instance,
                        delta: int, universe: Sequence[int] | None = None,
                        agent_ids: Sequence[int] | None = None) -> MultiAllocation:
    """Swap duplicated low-index chores for uncovered higher-index ones.

    Requires the coverage precondition (deficit of the copy counts over
    the universe at most delta) and an identically ordered instance, so
    each swap replaces a chore with a cheaper one.  At exit no uncovered
    chore has a duplicated chore below it, which caps l0 at delta.
    """
    if not check_identically_ordered(instance):
        raise ValueError("instance is not identically ordered")
    order = sorted(universe) if universe is not None else list(range(instance.m))
    agents = list(agent_ids) if agent_ids is not None \
        else list(range(len(alloc.bundles)))
    if len(agents) != len(alloc.bundles):
        raise ValueError("agent_ids length must match bundle count")
    in_universe = set(order)
    for b in alloc.bundles:
        if not in_universe.issuperset(b):
            raise ValueError("bundle contains chores outside the universe")
    counts = {a: 0 for a in order}
    for b in alloc.bundles:
        for g in b:
            counts[g] += 1
    report = coverage_deficit([counts[a] for a in order])
    if report.delta_max > delta:
        raise PreconditionViolated(
            f"coverage deficit {report.delta_max} exceeds delta={delta}")
    bundles = [set(b) for b in alloc.bundles]
    sizes = [len(b) for b in bundles]
    before = [instance.value(a, tuple(sorted(b)))
              for a, b in zip(agents, bundles)]
    while True:
        a_s = next((a for a in order if counts[a] >= 2), None)
        if a_s is None:
            break
        a_t = next((a for a in order if a > a_s and counts[a] == 0), None)
        if a_t is None:
            break
        holder = next(idx for idx, b in enumerate(bundles) if a_s in b)
        bundles[holder].remove(a_s)
        bundles[holder].add(a_t)
        counts[a_s] -= 1
        counts[a_t] += 1
    out = MultiAllocation(bundles=tuple(tuple(sorted(b)) for b in bundles))
    assert [len(b) for b in out.bundles] == sizes
    l0 = sum(1 for a in order if counts[a] == 0)
    assert l0 <= delta, f"l0={l0} exceeded delta={delta}"
    for a, b, v0 in zip(agents, out.bundles, before):
        assert instance.value(a, b) <= v0 + TOL
    return out


def ordered_chores_pipeline(instance: Instance, profile: MmsProfile,
                            cfg: SamplerConfig,
                            alpha: float | None = None) -> ChoresSampleResult:
    """Pre-assign, sample the survivors, gate on coverage deficit, repair.

    The measured deficit of the accepted draw is what bounds the final
    l0; the delta-star gate itself is reported but loose at small m.
    """
    if not check_identically_ordered(instance):
        raise ValueError("instance is not identically ordered")
    n, m = instance.n, instance.m
    if alpha is None:
        alpha = n ** 0.25 * math.log2(m)
        if alpha <= 0:  # m = 1 corner, any positive alpha behaves the same
            alpha = 1.0
    sub = preprocess_chores(instance, profile, alpha)
    live = sub.remaining_chores
    gate = math.floor(delta_star(n, m))
    pre_map = dict(sub.pre_bundles)
    preassigned = tuple(sorted(pre_map))
    if not live:
        bundles = tuple(pre_map.get(i, ()) for i in range(n))
        return ChoresSampleResult(alloc=MultiAllocation(bundles=bundles),
                                  retries=0, deficit=0,
                                  delta_star=delta_star(n, m),
                                  preassigned=preassigned)
    live_set = set(live)
    max_retries = cfg.retries_for(m)
    deficits = []
    accepted = None
    for trial in range(max_retries):
        rng = stream(cfg.seed, trial)
        drawn = []
        for i in sub.remaining_agents:
            parts = profile.inducing[i]
            j = int(rng.integers(0, len(parts)))
            drawn.append(tuple(sorted(live_set.intersection(parts[j]))))
        counts = {a: 0 for a in live}
        for b in drawn:
            for g in b:
                counts[g] += 1
        report = coverage_deficit([counts[a] for a in live])
        deficits.append(report.delta_max)
        if report.delta_max <= gate:
            accepted = (trial, tuple(drawn), report.delta_max)
            break
    if accepted is None:
        raise RetriesExhausted(
            max_retries, f"deficit gate {gate} never passed; observed "
            f"deficits min={min(deficits)} max={max(deficits)}")
    trial, drawn, deficit = accepted
    repaired = redistribute_chores(MultiAllocation(bundles=drawn), instance,
                                   deficit, universe=live,
                                   agent_ids=sub.remaining_agents)
    deduped = dedupe_keep_lowest(repaired.bundles)
    merged = []
    for i in range(n):
        if i in pre_map:
            merged.append(pre_map[i])
        else:
            merged.append(deduped[sub.remaining_agents.index(i)])
    alloc = MultiAllocation(bundles=tuple(merged))
    cv = char_vector(alloc, m)
    assert cv.linf <= 1
    assert cv.l0 <= deficit
    return ChoresSampleResult(alloc=alloc, retries=trial, deficit=deficit,
                              delta_star=delta_star(n, m),
                              preassigned=preassigned)


def brute_force_minmax_ratio(instance: Instance, profile: MmsProfile, *,
                             budget: int = 10 ** 8) -> tuple[float, MultiAllocation]:
    """Exact allocation minimizing the worst cost-to-share ratio, found by
    scanning all n^m assignments (lexicographically smallest optimum)."""
    if instance.kind != CHORES:
        raise ValueError("the ratio oracle is defined for chores")
    for i, spec in enumerate(instance.agents):
        if not isinstance(spec, Additive):
            raise ValueError(f"agents[{i}]: ratio oracle needs additive costs")
    n, m = instance.n, instance.m
    states = n ** m
    if states > budget:
        raise BudgetExceeded(states, budget, "ratio enumeration")
    rows = [list(instance.agents[i].weights) for i in range(n)]
    ratio, assign = kernels.minmax_ratio_assign(rows, list(profile.mu))
    blocks: list[list[int]] = [[] for _ in range(n)]
    for g, j in enumerate(assign):
        blocks[j].append(g)
    alloc = MultiAllocation(bundles=tuple(tuple(sorted(b)) for b in blocks))
    return float(ratio), alloc


def trim_additive_chores(instance: Instance, profile: MmsProfile, *,
                         budget: int = 10 ** 8) -> TrimResult:
    """Share-meeting partial allocation of additive chores by trimming.

    Starts from the min-max-ratio allocation (its ratio is guaranteed to
    be at most 11/9; a violation raises loudly), then removes the
    p_i = ceil(2 k_i / 11) costliest chores from each bundle of size k_i,
    which brings every agent down to at most mu_i and leaves
    l0 = sum p_i <= 2m/11 + n chores unassigned.
    """
    ratio, alloc = brute_force_minmax_ratio(instance, profile, budget=budget)
    if ratio > RATIO_BOUND + TOL:
        raise RatioAssertionFailed(
            f"min-max cost ratio {ratio} exceeds 11/9")
    kept_bundles = []
    removed_all = []
    trimmed = []
    for i, bundle in enumerate(alloc.bundles):
        k_i = len(bundle)
        p_i = (2 * k_i + 10) // 11  # ceil(2 k_i / 11)
        w = instance.agents[i].weights
        by_cost = sorted(bundle, key=lambda g: (-w[g], g))
        removed = sorted(by_cost[:p_i])
        kept = sorted(set(bundle).difference(removed))
        assert instance.value(i, kept) <= profile.mu[i] + TOL
        kept_bundles.append(tuple(kept))
        removed_all.append(tuple(removed))
        trimmed.append(p_i)
    out = MultiAllocation(bundles=tuple(kept_bundles))
    cv = char_vector(out, instance.m)
    assert cv.l0 == sum(trimmed)
    assert cv.l0 <= 2 * instance.m / 11 + instance.n + TOL
    return TrimResult(alloc=out, removed=tuple(removed_all), ratio=ratio,
                      trimmed_counts=tuple(trimmed))
