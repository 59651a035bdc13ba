"""Chores pipelines: sampler, pre-assignment, deficit repair, trimming."""

import math

import numpy as np
import pytest

import mmskit as mk
from mmskit.chores import RATIO_BOUND, delta_star, monotone_l0_limit

from oracles import oracle_interval_deficit, oracle_minmax_ratio


def _chores(vclass, n, m, seed):
    return mk.gen_random_instance(vclass, n, m, seed=seed, kind="chores")


def _uniform_additive(n, m, seed):
    # one shared nonincreasing weight row, so the instance is identically
    # ordered and every index swap toward 0 raises cost, toward m-1 lowers it
    rng = np.random.default_rng(seed)
    w = tuple(sorted((float(x) for x in rng.integers(1, 50, size=m)),
                     reverse=True))
    return mk.Instance(kind="chores", n=n, m=m,
                       agents=(mk.Additive(weights=w),) * n)


def test_l0_limit_formula():
    assert monotone_l0_limit(2, 8) == 2
    assert monotone_l0_limit(3, 9) == 2
    assert monotone_l0_limit(4, 10) == (10 * 3 ** 4) // 4 ** 4
    assert delta_star(4, 8) == pytest.approx(
        3.0 * 8 * math.log2(8) ** 1.5 / 4 ** 0.25)


def test_dedupe_keep_lowest():
    out = mk.dedupe_keep_lowest([(0, 2), (2, 1), (0, 3)])
    assert out == ((0, 2), (1,), (3,))
    assert mk.dedupe_keep_lowest([(), (1,)]) == ((), (1,))


@pytest.mark.parametrize("seed", range(20))
def test_sample_monotone_chores_contract(seed):
    n = 2 + seed % 3
    m = 4 + seed % 6
    inst = _chores("mixed", n, m, 300 + seed)
    prof = mk.compute_mms(inst)
    res = mk.sample_monotone_chores(inst, prof, mk.SamplerConfig(seed=seed))
    cv = mk.char_vector(res.alloc, m)
    assert cv.linf <= 1
    assert cv.l0 <= monotone_l0_limit(n, m)
    assert res.l0_limit == monotone_l0_limit(n, m)
    assert mk.verify_mms(inst, prof, res.alloc)


@pytest.mark.parametrize("seed", range(10))
def test_preprocess_keeps_enough_agents(seed):
    inst = _chores("ordered", 4, 8, 400 + seed)
    prof = mk.compute_mms(inst)
    alpha = 2.0 * math.log2(8)
    sub = mk.preprocess_chores(inst, prof, alpha)
    assert len(sub.remaining_agents) >= 4 * (1.0 - math.log2(8) / alpha) - 1e-9
    taken = set()
    for i, b in sub.pre_bundles:
        assert i not in sub.remaining_agents
        assert inst.value(i, b) <= prof.mu[i] + 1e-9
        assert not taken.intersection(b)
        taken.update(b)
    assert taken.isdisjoint(sub.remaining_chores)


def test_preprocess_eager_alpha_assigns_everything():
    inst = _uniform_additive(3, 6, 1)
    prof = mk.compute_mms(inst)
    sub = mk.preprocess_chores(inst, prof, alpha=0.1)
    # threshold 0.1 |U|/|N| is below any nonempty block, so agents keep
    # firing until the chores run out
    assert sub.remaining_chores == ()
    assert len(sub.pre_bundles) <= 3


def test_preprocess_rejects_bad_alpha():
    inst = _uniform_additive(2, 4, 2)
    prof = mk.compute_mms(inst)
    with pytest.raises(ValueError):
        mk.preprocess_chores(inst, prof, alpha=0.0)


@pytest.mark.parametrize("seed", range(40))
def test_coverage_deficit_matches_quadratic_scan(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 14))
    chi = [int(c) for c in rng.integers(0, 4, size=k)]
    rep = mk.coverage_deficit(chi)
    want, _ = oracle_interval_deficit(chi)
    assert rep.delta_max == want
    s, e = rep.witness
    assert 0 <= s <= e < k
    if rep.delta_max > 0:
        assert (e - s + 1) - sum(chi[s:e + 1]) == rep.delta_max


def test_coverage_deficit_edges():
    assert mk.coverage_deficit([]) == mk.CoverageReport(0, None)
    assert mk.coverage_deficit([2, 0]).delta_max == 1
    assert mk.coverage_deficit([0, 0, 0]).delta_max == 3
    assert mk.coverage_deficit([1, 1, 1]).delta_max == 0


@pytest.mark.parametrize("seed", range(30))
def test_redistribute_chores_caps_l0(seed):
    rng = np.random.default_rng(1000 + seed)
    n, m = 3, 8
    inst = _uniform_additive(n, m, seed)
    bundles = tuple(tuple(sorted(int(g) for g in
                                 rng.choice(m, size=rng.integers(1, 4),
                                            replace=False)))
                    for _ in range(n))
    counts = mk.char_vector(bundles, m).counts
    delta, _ = oracle_interval_deficit(counts)
    out = mk.redistribute_chores(mk.MultiAllocation(bundles=bundles),
                                 inst, delta)
    cv = mk.char_vector(out, m)
    assert cv.l0 <= delta
    assert [len(b) for b in out.bundles] == [len(b) for b in bundles]
    for i in range(n):
        assert inst.value(i, out.bundles[i]) <= \
            inst.value(i, bundles[i]) + 1e-9


def test_redistribute_chores_on_sub_universe():
    inst = _uniform_additive(3, 6, 3)
    alloc = mk.MultiAllocation(bundles=((1, 3), (1,)))
    out = mk.redistribute_chores(alloc, inst, delta=2, universe=(1, 3, 4, 5),
                                 agent_ids=(0, 2))
    covered = set().union(*out.bundles)
    assert sum(1 for g in (1, 3, 4, 5) if g not in covered) <= 2


def test_redistribute_chores_precondition_violated():
    inst = _uniform_additive(2, 4, 4)
    alloc = mk.MultiAllocation(bundles=((0,), (0,)))
    with pytest.raises(mk.PreconditionViolated):
        mk.redistribute_chores(alloc, inst, delta=2)


def test_redistribute_chores_input_validation():
    inst = _uniform_additive(2, 4, 5)
    alloc = mk.MultiAllocation(bundles=((0,), (1,)))
    with pytest.raises(ValueError, match="universe"):
        mk.redistribute_chores(alloc, inst, delta=4, universe=(0, 2))
    with pytest.raises(ValueError, match="agent_ids"):
        mk.redistribute_chores(alloc, inst, delta=4, agent_ids=(0,))
    unordered = mk.Instance(kind="chores", n=2, m=2,
                            agents=(mk.Additive(weights=(1, 2)),
                                    mk.Additive(weights=(2, 1))))
    with pytest.raises(ValueError, match="ordered"):
        mk.redistribute_chores(mk.MultiAllocation(bundles=((0,), (1,))),
                               unordered, delta=2)


@pytest.mark.parametrize("seed", range(15))
def test_ordered_pipeline_end_to_end(seed):
    inst = _chores("ordered", 3, 6, 500 + seed)
    prof = mk.compute_mms(inst)
    res = mk.ordered_chores_pipeline(inst, prof, mk.SamplerConfig(seed=seed))
    cv = mk.char_vector(res.alloc, 6)
    assert cv.linf <= 1
    assert cv.l0 <= res.deficit <= math.floor(res.delta_star)
    assert mk.verify_mms(inst, prof, res.alloc)
    for i in res.preassigned:
        assert inst.value(i, res.alloc.bundles[i]) <= prof.mu[i] + 1e-9


def test_ordered_pipeline_single_agent_takes_all():
    inst = _uniform_additive(1, 4, 6)
    prof = mk.compute_mms(inst)
    res = mk.ordered_chores_pipeline(inst, prof, mk.SamplerConfig(seed=0),
                                     alpha=1.0)
    assert res.alloc.bundles == ((0, 1, 2, 3),)
    assert res.deficit == 0 and res.retries == 0
    assert res.preassigned == (0,)


def test_ordered_pipeline_rejects_mixed_instance():
    inst = mk.Instance(kind="chores", n=2, m=3,
                       agents=(mk.Additive(weights=(3, 2, 1)),
                               mk.Additive(weights=(1, 2, 3))))
    prof = mk.compute_mms(inst)
    with pytest.raises(ValueError, match="ordered"):
        mk.ordered_chores_pipeline(inst, prof, mk.SamplerConfig(seed=0))


@pytest.mark.parametrize("seed", range(10))
def test_minmax_ratio_matches_oracle(seed):
    n = 2 + seed % 2
    m = 4 + seed % 2
    inst = _chores("additive", n, m, 600 + seed)
    prof = mk.compute_mms(inst)
    ratio, alloc = mk.brute_force_minmax_ratio(inst, prof)
    rows = [inst.agents[i].weights for i in range(n)]
    assert ratio == pytest.approx(oracle_minmax_ratio(rows, prof.mu),
                                  rel=1e-9, abs=1e-9)
    worst = max((inst.value(i, b) / prof.mu[i]) if prof.mu[i] > 1e-9 else 0.0
                for i, b in enumerate(alloc.bundles))
    assert worst == pytest.approx(ratio, rel=1e-9, abs=1e-9)


def test_minmax_ratio_guards():
    goods = mk.gen_random_instance("additive", 2, 4, seed=1)
    prof = mk.compute_mms(goods)
    with pytest.raises(ValueError):
        mk.brute_force_minmax_ratio(goods, prof)
    inst = _chores("additive", 2, 4, 7)
    prof = mk.compute_mms(inst)
    with pytest.raises(mk.BudgetExceeded):
        mk.brute_force_minmax_ratio(inst, prof, budget=3)


@pytest.mark.parametrize("seed", range(12))
def test_trim_contract(seed):
    n = 2 + seed % 2
    m = 4 + seed % 4
    inst = _chores("additive", n, m, 700 + seed)
    prof = mk.compute_mms(inst)
    res = mk.trim_additive_chores(inst, prof)
    assert res.ratio <= RATIO_BOUND + 1e-9
    cv = mk.char_vector(res.alloc, m)
    assert cv.linf <= 1
    want_l0 = sum((2 * len(b) + 10) // 11
                  for b in _rebuilt_bundles(res))
    assert cv.l0 == want_l0 == sum(res.trimmed_counts)
    assert cv.l0 <= 2 * m / 11 + n + 1e-9
    for i, b in enumerate(res.alloc.bundles):
        assert inst.value(i, b) <= prof.mu[i] + 1e-9


def _rebuilt_bundles(res):
    return [tuple(sorted(k + r))
            for k, r in zip(res.alloc.bundles, res.removed)]


def test_trim_removes_costliest_first():
    w = (9.0, 7.0, 5.0, 3.0, 2.0, 1.0)
    inst = mk.Instance(kind="chores", n=1, m=6,
                       agents=(mk.Additive(weights=w),))
    prof = mk.compute_mms(inst)
    res = mk.trim_additive_chores(inst, prof)
    # single bundle of size 6 sheds ceil(12/11) = 2 chores, the two dearest
    assert res.trimmed_counts == (2,)
    assert res.removed == ((0, 1),)


def test_trim_ratio_violation_is_loud():
    inst = _chores("additive", 2, 4, 9)
    fake = mk.MmsProfile(mu=(0.25, 0.25), inducing=mk.compute_mms(inst).inducing)
    with pytest.raises(mk.RatioAssertionFailed):
        mk.trim_additive_chores(inst, fake)
