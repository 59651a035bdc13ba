"""Outcome gate: one test and one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they stream; without ``-s`` the per-criterion verdict is the test row
itself.  Statistical checks use fixed seeds, so reruns are exact.
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np

import mmskit as mk
from mmskit.chores import delta_star, monotone_l0_limit
from mmskit.goods import (
    PrefixFamily, draw_uniform_blocks, entitled_l1_limit,
    entitled_linf_limit, monotone_linf_limit, prefix_budget,
)
from mmskit.harness import random_entitlements
from mmskit.rng import stream

from oracles import oracle_interval_deficit, oracle_min_l0, oracle_min_linf
from test_shares import GOLDEN


def _report(cid: str, ok: bool, detail: str) -> None:
    print(f"{cid} {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    assert ok, f"{cid}: {detail}"


def test_c01_exact_shares_on_golden_set():
    worst = 0.0
    bad = []
    for idx, (inst, mu, inducing0) in enumerate(GOLDEN):
        t0 = time.perf_counter()
        prof = mk.compute_mms(inst)
        worst = max(worst, time.perf_counter() - t0)
        if any(abs(a - b) > 1e-9 for a, b in zip(prof.mu, mu)):
            bad.append(idx)
        elif prof.inducing[0] != inducing0:
            bad.append(idx)
    _report("C01", not bad and worst < 1.0,
            f"12/12 golden instances, slowest {worst * 1000:.1f} ms"
            if not bad else f"mismatches at {bad}")


def test_c02_monotone_goods_sampler():
    accepted = 0
    gate_ok = True
    for t in range(200):
        n = (2, 3, 4)[t % 3]
        m = 4 + t % 7
        inst = mk.gen_random_instance("mixed", n, m, seed=(111, t))
        prof = mk.compute_mms(inst)
        try:
            res = mk.sample_monotone_goods(inst, prof,
                                           mk.SamplerConfig(seed=(112, t)))
        except mk.RetriesExhausted:
            continue
        accepted += 1
        cv = mk.char_vector(res.alloc, m)
        gate_ok &= mk.verify_mms(inst, prof, res.alloc)
        gate_ok &= cv.linf <= monotone_linf_limit(m) and cv.l1 <= m

    inst = mk.gen_random_instance("mixed", 3, 8, seed=(113, 0))
    prof = mk.compute_mms(inst)
    total = 0
    for d in range(10 ** 4):
        total += mk.char_vector(draw_uniform_blocks(prof, stream(114, d)), 8).l1
    mean_chi = total / (10 ** 4 * 8)
    _report("C02",
            accepted >= 198 and gate_ok and abs(mean_chi - 1.0) <= 0.05,
            f"{accepted}/200 accepted, mean chi {mean_chi:.4f}")


def test_c03_ordered_goods_pipeline():
    fam = PrefixFamily(8)
    runs = ok = 0
    for t in range(100):
        rng = stream(221, t)
        agents = tuple(
            mk.Additive(weights=tuple(sorted((float(x) for x in
                                              rng.integers(1, 101, size=8)),
                                             reverse=True)))
            for _ in range(4))
        inst = mk.Instance(kind="goods", n=4, m=8, agents=agents)
        prof = mk.compute_mms(inst)
        for s in range(10):
            runs += 1
            cfg = mk.SamplerConfig(seed=(222, t, s))
            base = mk.sample_ordered_goods_base(inst, prof, cfg)
            bcv = mk.char_vector(base.alloc, 8)
            prefixes_ok = all(
                sum(bcv.counts[g] for g in p) <= prefix_budget(8, len(p)) + 1e-9
                for p in fam.prefixes)
            res = mk.dup_ordered(inst, prof, cfg)
            rcv = mk.char_vector(res.alloc, 8)
            values_ok = all(
                inst.value(i, res.alloc.bundles[i])
                >= inst.value(i, base.alloc.bundles[i]) - 1e-9
                for i in range(4))
            sizes_ok = [len(b) for b in res.alloc.bundles] == \
                       [len(b) for b in base.alloc.bundles]
            if prefixes_ok and values_ok and sizes_ok \
                    and rcv.linf <= cfg.tau_for(8) and rcv.l1 == bcv.l1:
                ok += 1
    _report("C03", ok == runs == 1000, f"{ok}/{runs} runs clean")


def _c04_check(inst, slow):
    t0 = time.perf_counter()
    prof = mk.compute_mms(inst)
    res = mk.duplicate_additive(inst)
    elapsed = time.perf_counter() - t0
    cv = mk.char_vector(res.alloc, inst.m)
    good = cv.linf <= 2 and cv.l1 == 2 * inst.m
    for i in range(inst.n):
        good &= inst.value(i, res.alloc.bundles[i]) >= prof.mu[i] - 1e-9
        good &= res.doubled.mu[i] >= 2 * prof.mu[i] - 1e-9
    return good, max(slow, elapsed)


def test_c04_duplication_exhaustive_grid():
    count, slow = 0, 0.0
    all_good = True
    for n, ms in ((2, (1, 2, 3)), (3, (2,))):
        for m in ms:
            for rows in itertools.product(
                    itertools.product(range(1, 5), repeat=m), repeat=n):
                inst = mk.Instance(
                    kind="goods", n=n, m=m,
                    agents=tuple(mk.Additive(weights=tuple(map(float, r)))
                                 for r in rows))
                good, slow = _c04_check(inst, slow)
                all_good &= good
                count += 1
    rng = stream(231)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(1, 6))
        agents = tuple(
            mk.Additive(weights=tuple(float(x)
                                      for x in rng.integers(0, 5, size=m)))
            for _ in range(n))
        inst = mk.Instance(kind="goods", n=n, m=m, agents=agents)
        good, slow = _c04_check(inst, slow)
        all_good &= good
        count += 1
    _report("C04", all_good and slow < 10.0,
            f"{count} instances, slowest {slow * 1000:.1f} ms")


def test_c05_monotone_chores_sampler():
    all_good = True
    for t in range(200):
        n = (2, 3, 4)[t % 3]
        m = 4 + t % 7
        inst = mk.gen_random_instance("mixed", n, m, seed=(115, t),
                                      kind="chores")
        prof = mk.compute_mms(inst)
        res = mk.sample_monotone_chores(inst, prof,
                                        mk.SamplerConfig(seed=(116, t)))
        all_good &= mk.verify_mms(inst, prof, res.alloc)
        all_good &= mk.char_vector(res.alloc, m).l0 <= monotone_l0_limit(n, m)

    inst = mk.gen_random_instance("mixed", 3, 8, seed=(117, 0), kind="chores")
    prof = mk.compute_mms(inst)
    vals = np.array([
        mk.char_vector(draw_uniform_blocks(prof, stream(118, d)), 8).l0
        for d in range(10 ** 4)], dtype=float)
    want = 8 * (1 - 1 / 3) ** 3
    sem = vals.std(ddof=1) / math.sqrt(len(vals))
    drift = abs(vals.mean() - want)
    _report("C05", all_good and drift <= 3 * sem,
            f"200/200 within l0 limit, mean l0 {vals.mean():.4f} "
            f"vs {want:.4f} (3 sem {3 * sem:.4f})")


def test_c06_preassignment_and_deficit_repair():
    pre_ok = True
    for t in range(20):
        inst = mk.gen_random_instance("ordered", 4, 8, seed=(241, t),
                                      kind="chores")
        prof = mk.compute_mms(inst)
        for alpha in (math.log2(8), 2 * math.log2(8)):
            sub = mk.preprocess_chores(inst, prof, alpha)
            bound = 4 * (1.0 - math.log2(8) / alpha)
            pre_ok &= len(sub.remaining_agents) >= bound - 1e-9
            pre_ok &= all(inst.value(i, b) <= prof.mu[i] + 1e-9
                          for i, b in sub.pre_bundles)

    repair_ok = 0
    rng = stream(242)
    for t in range(10 ** 3):
        n, m = 3, 8
        w = tuple(sorted((float(x) for x in rng.integers(1, 50, size=m)),
                         reverse=True))
        inst = mk.Instance(kind="chores", n=n, m=m,
                           agents=(mk.Additive(weights=w),) * n)
        bundles = tuple(
            tuple(sorted(int(g) for g in rng.choice(m, size=int(rng.integers(1, 4)),
                                                    replace=False)))
            for _ in range(n))
        delta, _ = oracle_interval_deficit(mk.char_vector(bundles, m).counts)
        out = mk.redistribute_chores(mk.MultiAllocation(bundles=bundles),
                                     inst, delta)
        if mk.char_vector(out, m).l0 <= delta:
            repair_ok += 1

    gate_floor = min(delta_star(n, m) for n in (2, 3, 4)
                     for m in range(4, 11))
    _report("C06", pre_ok and repair_ok == 1000 and gate_floor > 10,
            f"preassignment bound held 40/40, repair {repair_ok}/1000, "
            f"deficit gate >= {gate_floor:.1f} > m on the whole grid "
            "(vacuous; reported, never asserted on outputs)")


def test_c07_chores_trimming():
    all_good = True
    worst_ratio = 0.0
    count = 0
    for n in (2, 3):
        for m in (4, 5, 6, 7):
            for s in range(25):
                inst = mk.gen_random_instance("additive", n, m,
                                              seed=(251, n, m, s),
                                              kind="chores")
                prof = mk.compute_mms(inst)
                res = mk.trim_additive_chores(inst, prof)
                worst_ratio = max(worst_ratio, res.ratio)
                cv = mk.char_vector(res.alloc, m)
                want_l0 = sum((2 * (len(k) + len(r)) + 10) // 11
                              for k, r in zip(res.alloc.bundles, res.removed))
                all_good &= cv.l0 == want_l0 == sum(res.trimmed_counts)
                all_good &= cv.l0 <= 2 * m / 11 + n + 1e-9
                all_good &= all(inst.value(i, b) <= prof.mu[i] + 1e-9
                                for i, b in enumerate(res.alloc.bundles))
                count += 1
    _report("C07", all_good and worst_ratio <= 11 / 9 + 1e-9,
            f"{count} instances, worst cost ratio {worst_ratio:.6f} "
            f"<= {11 / 9:.6f}")


def test_c08_lowerbound_generators_and_verifiers():
    mu_ok = True
    agree = True
    linf_seen = []
    l0_seen = []
    for t in range(20):
        n = 2 + t % 2
        m = n + 3 + t % 2
        flavor = ("threshold", "xos")[t % 2]
        inst, fam = mk.gen_goods_lb_instance(n, m, flavor, seed=(261, t))
        mu_ok &= mk.compute_mms(inst).mu == (1.0,) * n
        val, _ = mk.min_linf_over_family(inst, fam)
        agree &= val == oracle_min_linf(fam.partitions, m)
        linf_seen.append(val)

        cinst, cfam = mk.gen_chores_lb_instance(n, m, seed=(262, t))
        mu_ok &= mk.compute_mms(cinst).mu == (0.0,) * n
        cval, _ = mk.min_l0_over_family(cinst, cfam)
        agree &= cval == oracle_min_l0(cfam.partitions, m)
        l0_seen.append(cval)
    _report("C08", mu_ok and agree,
            f"shares exact on 40 instances; desk minima observed: "
            f"linf {min(linf_seen)}..{max(linf_seen)}, "
            f"l0 {min(l0_seen)}..{max(l0_seen)} (reported only)")


def test_c09_reduction_equivalence():
    t0 = time.perf_counter()
    checks = 0
    all_agree = True
    for nv in range(2, 6):
        all_edges = list(itertools.combinations(range(nv), 2))
        for bits in range(1 << len(all_edges)):
            edges = tuple(e for i, e in enumerate(all_edges) if bits >> i & 1)
            graph = mk.Graph(num_vertices=nv, edges=edges)
            for k in range(2, nv + 1):
                red = mk.hardness_reduce(graph, k)
                all_agree &= (mk.disjoint_selection_exists(red.family)
                              == mk.independent_set_exists(graph, k))
                checks += 1
    rng = stream(271)
    for _ in range(200):
        edges = tuple(e for e in itertools.combinations(range(6), 2)
                      if rng.random() < 0.5)
        graph = mk.Graph(num_vertices=6, edges=edges)
        k = int(rng.integers(2, 7))
        red = mk.hardness_reduce(graph, k)
        all_agree &= (mk.disjoint_selection_exists(red.family)
                      == mk.independent_set_exists(graph, k))
        checks += 1
    elapsed = time.perf_counter() - t0
    _report("C09", all_agree and elapsed < 60.0,
            f"{checks} graph/k checks agree in {elapsed:.1f} s")


def test_c10_entitlements():
    worst = 0.0
    for t in range(10 ** 5):
        n = 1 + t % 12
        ents = random_entitlements(n, stream(334, t))
        worst = max(worst, sum(1.0 / ni for ni in ents.n_parts))

    sampler_ok = True
    for t in range(200):
        n = 2 + t % 2
        m = 4 + t % 5
        inst = mk.gen_random_instance("mixed", n, m, seed=(335, t),
                                      with_entitlements=True)
        prof = mk.compute_mms_hat(inst)
        res = mk.sample_entitled(inst, prof, mk.SamplerConfig(seed=(336, t)))
        cv = mk.char_vector(res.alloc, m)
        sampler_ok &= cv.linf <= entitled_linf_limit(m)
        sampler_ok &= cv.l1 <= entitled_l1_limit(m)
        sampler_ok &= all(inst.value(i, b) >= prof.mu[i] - 1e-9
                          for i, b in enumerate(res.alloc.bundles))
    _report("C10", worst <= 1.7 and sampler_ok,
            f"harmonic sum <= {worst:.4f} over 1e5 vectors, "
            "200/200 entitled draws within gates")


def test_c11_determinism(tmp_path):
    argv = ["experiment", "--methods", "goods-monotone,chores-monotone",
            "--n", "2,3", "--m", "4,5", "--trials", "5", "--seed", "97"]
    outs = []
    for extra in ([], [], ["--workers", "4"]):
        proc = subprocess.run([sys.executable, "-m", "mmskit"] + argv + extra,
                              capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(proc.stdout)
    csv_ok = outs[0] == outs[1] == outs[2]

    inst = mk.gen_random_instance("mixed", 3, 6, seed=98)
    path = tmp_path / "inst.json"
    path.write_text(mk.serialize_instance(inst), encoding="utf-8")
    from mmskit.cli import main
    blobs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["dup-goods", str(path), "--method", "monotone",
                     "--seed", "5", "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    json_ok = blobs[0] == blobs[1]
    _report("C11", csv_ok and json_ok,
            "experiment CSV identical across reruns and 1 vs 4 workers; "
            "allocation JSON identical across runs")
