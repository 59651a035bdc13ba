"""MMS multi-allocations of goods with a bounded number of extra copies.

Every sampler here draws one block per agent, uniformly, from that
agent's share-inducing partition, then rejection-samples until the copy
counts pass the advertised gates.  Retry streams are derived from
``(seed, trial)`` so trial t is reproducible in isolation and the
accepted draw is the one with the smallest trial index.

``redistribute_goods`` is the deterministic copy-rebalancing pass for
identically ordered instances: it repeatedly swaps a copy of the lowest
over-threshold good for the lowest under-threshold good of smaller
index, which can only raise the holder's value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .core import (
    GOODS, Additive, Bundle, DoubledMmsProfile, Instance, MmsProfile,
    MultiAllocation, TOL, char_vector, check_identically_ordered,
)
from .errors import NoDonorGood, RetriesExhausted, SearchFailed
from .rng import stream

__all__ = [
    "SamplerConfig", "SampleResult", "DuplicationResult", "PrefixFamily",
    "default_tau", "monotone_linf_limit", "entitled_linf_limit",
    "entitled_l1_limit", "ordered_l1_limit", "prefix_budget",
    "draw_uniform_blocks", "sample_monotone_goods",
    "sample_ordered_goods_base", "redistribute_goods", "dup_ordered",
    "duplicate_additive", "sample_entitled",
]


def _log2(m: int) -> float:
    return math.log2(m)


def default_tau(m: int) -> int:
    """Copy threshold for redistribution: ceil(12 sqrt(log2 m)), at least 1."""
    return max(1, math.ceil(12.0 * math.sqrt(_log2(m))))


def monotone_linf_limit(m: int) -> int:
    return max(6, math.ceil(3.0 * _log2(m)))


def entitled_linf_limit(m: int) -> int:
    return max(12, math.ceil(3.0 * _log2(m)))


def entitled_l1_limit(m: int) -> int:
    # ceil(1.7 m) in exact integer arithmetic
    return (17 * m + 9) // 10


def ordered_l1_limit(n: int, m: int) -> int:
    return m + math.ceil(6.0 * m * math.sqrt(_log2(m)) / math.sqrt(n))


def prefix_budget(m: int, size: int) -> float:
    """Copy budget for a prefix of the given size under the ordered gates."""
    return 6.0 * math.sqrt(_log2(m)) * size


@dataclass(frozen=True)
class SamplerConfig:
    """Seed plus optional overrides for the rejection samplers.

    ``max_retries`` defaults to 64 (m + 1) and ``tau`` to the
    redistribution threshold ceil(12 sqrt(log2 m)).
    """

    seed: int | tuple[int, ...]
    max_retries: int | None = None
    tau: int | None = None

    def retries_for(self, m: int) -> int:
        return self.max_retries if self.max_retries is not None \
            else 64 * (m + 1)

    def tau_for(self, m: int) -> int:
        return self.tau if self.tau is not None else default_tau(m)


@dataclass(frozen=True)
class PrefixFamily:
    """Nested dyadic prefixes of the item order: sizes min(2^t, m)."""

    m: int

    @property
    def prefixes(self) -> tuple[Bundle, ...]:
        tmax = math.ceil(_log2(self.m)) if self.m > 1 else 0
        return tuple(tuple(range(min(1 << t, self.m)))
                     for t in range(tmax + 1))


@dataclass(frozen=True)
class SampleResult:
    alloc: MultiAllocation
    retries: int
    linf_limit: int | None = None
    l1_limit: int | None = None
    tau: int | None = None


@dataclass(frozen=True)
class DuplicationResult:
    alloc: MultiAllocation
    doubled: DoubledMmsProfile | None


def draw_uniform_blocks(profile: MmsProfile, rng) -> MultiAllocation:
    """One uniform block per agent from their inducing partition."""
    bundles = []
    for parts in profile.inducing:
        j = int(rng.integers(0, len(parts)))
        bundles.append(parts[j])
    return MultiAllocation(bundles=tuple(bundles))


def sample_monotone_goods(instance: Instance, profile: MmsProfile,
                          cfg: SamplerConfig) -> SampleResult:
    """Rejection-sample a share-meeting multi-allocation of goods.

    Accepts a draw when linf <= max(6, ceil(3 log2 m)) and l1 <= m; every
    agent's bundle is a block of their own inducing partition, hence
    worth at least mu_i.
    """
    m = instance.m
    linf_limit = monotone_linf_limit(m)
    max_retries = cfg.retries_for(m)
    for trial in range(max_retries):
        alloc = draw_uniform_blocks(profile, stream(cfg.seed, trial))
        cv = char_vector(alloc, m)
        if cv.linf <= linf_limit and cv.l1 <= m:
            return SampleResult(alloc=alloc, retries=trial,
                                linf_limit=linf_limit, l1_limit=m)
    raise RetriesExhausted(max_retries, "monotone goods gates never passed")


def _ordered_blocks(profile: MmsProfile, i: int) -> list[Bundle]:
    """Agent i's blocks sorted by cardinality, ties by content."""
    return sorted(profile.inducing[i], key=lambda b: (len(b), b))


def sample_ordered_goods_base(instance: Instance, profile: MmsProfile,
                              cfg: SamplerConfig) -> SampleResult:
    """Base draw for identically ordered goods: agents pick uniformly among
    their small blocks (cardinality <= 2m/n, always at least ceil(n/2) of
    them) and the draw must pass the total and dyadic-prefix copy gates."""
    if not check_identically_ordered(instance):
        raise ValueError("instance is not identically ordered")
    n, m = instance.n, instance.m
    small: list[list[Bundle]] = []
    for i in range(n):
        blocks = _ordered_blocks(profile, i)
        s_i = sum(1 for b in blocks if len(b) * n <= 2 * m)
        assert s_i >= math.ceil(n / 2), "small-block count below n/2"
        small.append(blocks[:s_i])
    l1_limit = ordered_l1_limit(n, m)
    prefixes = PrefixFamily(m).prefixes
    budgets = [prefix_budget(m, len(p)) for p in prefixes]
    max_retries = cfg.retries_for(m)
    for trial in range(max_retries):
        rng = stream(cfg.seed, trial)
        bundles = tuple(blocks[int(rng.integers(0, len(blocks)))]
                        for blocks in small)
        cv = char_vector(bundles, m)
        if cv.l1 > l1_limit:
            continue
        prefix_counts = _prefix_sums(cv.counts, prefixes)
        if all(c <= b + TOL for c, b in zip(prefix_counts, budgets)):
            return SampleResult(alloc=MultiAllocation(bundles=bundles),
                                retries=trial, l1_limit=l1_limit)
    raise RetriesExhausted(max_retries, "ordered goods gates never passed")


def _prefix_sums(counts, prefixes) -> list[int]:
    return [sum(counts[g] for g in p) for p in prefixes]


def redistribute_goods(alloc: MultiAllocation, instance: Instance,
                       tau: int) -> MultiAllocation:
    """Cap copy counts at tau by swapping copies of over-subscribed goods
    for lower-index under-subscribed ones (identically ordered instances,
    so each swap cannot lower the holder's value).

    Preserves bundle sizes and l1; raises NoDonorGood when some good
    exceeds tau but no lower-index good sits below tau.
    """
    m = instance.m
    if not check_identically_ordered(instance):
        raise ValueError("instance is not identically ordered")
    bundles = [set(b) for b in alloc.bundles]
    counts = list(char_vector(alloc, m).counts)
    before = [instance.value(i, b) for i, b in enumerate(alloc.bundles)]
    sizes = [len(b) for b in alloc.bundles]
    while max(counts) > tau:
        g_t = next(g for g in range(m) if counts[g] > tau)
        g_s = next((s for s in range(g_t) if counts[s] < tau), None)
        if g_s is None:
            raise NoDonorGood(f"good {g_t} has {counts[g_t]} copies but no "
                              f"lower-index good is below tau={tau}")
        i = next(i for i, b in enumerate(bundles)
                 if g_t in b and g_s not in b)
        bundles[i].remove(g_t)
        bundles[i].add(g_s)
        counts[g_t] -= 1
        counts[g_s] += 1
    out = MultiAllocation(bundles=tuple(tuple(sorted(b)) for b in bundles))
    assert [len(b) for b in out.bundles] == sizes
    assert sum(counts) == char_vector(alloc, m).l1
    for i, b in enumerate(out.bundles):
        assert instance.value(i, b) >= before[i] - TOL
    return out


def dup_ordered(instance: Instance, profile: MmsProfile,
                cfg: SamplerConfig) -> SampleResult:
    """Full ordered-goods pipeline: base draw, then cap copies at tau."""
    base = sample_ordered_goods_base(instance, profile, cfg)
    tau = cfg.tau_for(instance.m)
    alloc = redistribute_goods(base.alloc, instance, tau)
    return SampleResult(alloc=alloc, retries=base.retries,
                        linf_limit=tau, l1_limit=base.l1_limit, tau=tau)


def duplicate_additive(instance: Instance, *,
                       budget: int = 10 ** 8) -> DuplicationResult:
    """Exact two-copies-per-good allocation for additive goods.

    Computes the constrained doubled shares, then scans feasible exact
    partitions of the two-copy set lexicographically for the first one
    giving every agent at least half their doubled share; projecting the
    copies back yields bundles worth >= mu_i with every chi_g <= 2 and
    l1 = 2m.  A single agent simply takes all goods once.
    """
    if instance.kind != GOODS:
        raise ValueError("duplication is defined for goods")
    for i, spec in enumerate(instance.agents):
        if not isinstance(spec, Additive):
            raise ValueError(f"agents[{i}]: duplication needs additive "
                             "valuations")
    if instance.n == 1:
        whole = tuple(range(instance.m))
        return DuplicationResult(alloc=MultiAllocation(bundles=(whole,)),
                                 doubled=None)
    from .shares import compute_constrained_mms
    doubled = compute_constrained_mms(instance, budget=budget)
    rows = [list(instance.agents[i].weights) for i in range(instance.n)]
    targets = [v / 2.0 for v in doubled.mu]
    assign = kernels.first_feasible_doubled(rows, targets)
    if assign is None:
        raise SearchFailed("no feasible doubled allocation meets half the "
                           "constrained shares")
    bundles: list[set[int]] = [set() for _ in range(instance.n)]
    for d, j in enumerate(assign):
        bundles[j].add(d >> 1)
    alloc = MultiAllocation(bundles=tuple(tuple(sorted(b)) for b in bundles))
    cv = char_vector(alloc, instance.m)
    assert cv.linf <= 2 and cv.l1 == 2 * instance.m
    return DuplicationResult(alloc=alloc, doubled=doubled)


def sample_entitled(instance: Instance, hat_profile: MmsProfile,
                    cfg: SamplerConfig) -> SampleResult:
    """Rejection-sample against entitlement shares: agent i draws one of
    the n_i blocks of their inducing partition; gates are
    linf <= max(12, ceil(3 log2 m)) and l1 <= ceil(1.7 m)."""
    if instance.entitlements is None:
        raise ValueError("instance has no entitlements")
    m = instance.m
    linf_limit = entitled_linf_limit(m)
    l1_limit = entitled_l1_limit(m)
    max_retries = cfg.retries_for(m)
    for trial in range(max_retries):
        alloc = draw_uniform_blocks(hat_profile, stream(cfg.seed, trial))
        cv = char_vector(alloc, m)
        if cv.linf <= linf_limit and cv.l1 <= l1_limit:
            for i, b in enumerate(alloc.bundles):
                assert instance.value(i, b) >= hat_profile.mu[i] - TOL
            return SampleResult(alloc=alloc, retries=trial,
                                linf_limit=linf_limit, l1_limit=l1_limit)
    raise RetriesExhausted(max_retries, "entitled gates never passed")
