"""Compare the compiled and pure-Python kernel backends.

Run from the repo root:

    python3 benchmarks/bench_kernels.py --repeat 5

The backends are loaded side by side, so this works regardless of which
one the package itself selected.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mmskit.kernels import _pykernels

try:
    from mmskit.kernels import _ckernels
except ImportError:
    _ckernels = None


def _bench(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(rng):
    m_tab = 12
    table = np.maximum.accumulate(rng.random(1 << m_tab))
    table[0] = 0.0
    weights = sorted(rng.random(12).tolist(), reverse=True)
    rows = [sorted(rng.random(9).tolist(), reverse=True) for _ in range(3)]
    targets = [sum(r) * 0.6 for r in rows]
    cost_rows = [rng.random(10).tolist() for _ in range(3)]
    mu = [max(r) for r in cost_rows]
    fam = []
    for _ in range(6):
        assign = rng.integers(0, 6, size=14)
        blocks = [[] for _ in range(6)]
        for g, j in enumerate(assign):
            blocks[int(j)].append(g)
        fam.append(blocks)
    return [
        ("assign_opt_table", (table.tolist(), 3, m_tab, True)),
        ("assign_opt_additive", (weights, 4, True)),
        ("constrained_opt_additive", (weights[:6], 3)),
        ("first_feasible_doubled", (rows, targets)),
        ("minmax_ratio_assign", (cost_rows, mu)),
        ("min_linf_selection", (fam, 14)),
        ("min_l0_selection", (fam, 14)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cases = _cases(rng)
    print(f"{'kernel':28s} {'pure (s)':>12s} {'compiled (s)':>14s} {'speedup':>9s}")
    for name, fargs in cases:
        t_py, out_py = _bench(getattr(_pykernels, name), fargs, args.repeat)
        if _ckernels is None:
            print(f"{name:28s} {t_py:12.6f} {'n/a':>14s} {'n/a':>9s}")
            continue
        t_c, out_c = _bench(getattr(_ckernels, name), fargs, args.repeat)
        v_py = out_py[0] if isinstance(out_py, tuple) else out_py
        v_c = out_c[0] if isinstance(out_c, tuple) else out_c
        if isinstance(v_py, float) and v_py != v_c:
            raise SystemExit(f"{name}: backends disagree ({v_py} vs {v_c})")
        print(f"{name:28s} {t_py:12.6f} {t_c:14.6f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
