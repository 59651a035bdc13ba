"""Command line front end.

Verbs:
  compute         exact shares (plain, entitled, or constrained doubled)
  dup-goods       share-meeting goods multi-allocation, bounded duplication
  dispose-chores  share-respecting chores multi-allocation, bounded disposal
  lowerbound      adversarial instances, exact best linf/l0 per seed (CSV)
  hardness        independent-set vs disjoint-selection equivalence check
  experiment      randomized pipeline sweeps (CSV)
  gen             random instance generator

Exit codes: 0 success, 2 search budget exhausted, 3 sampler retries
exhausted, 1 any other failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adversarial import (
    gen_chores_lb_instance, gen_goods_lb_instance, hardness_reduce,
    disjoint_selection_exists, independent_set_exists,
    min_l0_over_family, min_linf_over_family, parse_graph,
)
from .chores import (
    ordered_chores_pipeline, sample_monotone_chores, trim_additive_chores,
)
from .core import (
    allocation_to_dict, parse_instance, serialize_instance,
)
from .errors import BudgetExceeded, MmsError, RetriesExhausted
from .goods import (
    SamplerConfig, dup_ordered, duplicate_additive, sample_entitled,
    sample_monotone_goods,
)
from .harness import (
    Cell, ExperimentConfig, gen_random_instance, run_experiment,
    trials_to_csv, METHODS, VALUATION_CLASSES,
)
from .shares import (
    DEFAULT_BUDGET, compute_constrained_mms, compute_mms, compute_mms_hat,
)

__all__ = ["main", "build_parser"]


def _load_instance(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cmd_compute(args) -> str:
    instance = _load_instance(args.instance)
    if args.constrained:
        profile = compute_constrained_mms(instance, budget=args.budget)
        inducing = [[[2 * g + (c - 1) for g, c in block] for block in parts]
                    for parts in profile.inducing]
    else:
        if args.entitled:
            profile = compute_mms_hat(instance, budget=args.budget)
        else:
            profile = compute_mms(instance, budget=args.budget)
        inducing = [[list(block) for block in parts]
                    for parts in profile.inducing]
    mu = list(profile.mu)
    if args.agent is not None:
        mu, inducing = [mu[args.agent]], [inducing[args.agent]]
    return _json({"mu": mu, "inducing": inducing})


def _cmd_dup_goods(args) -> str:
    instance = _load_instance(args.instance)
    cfg = SamplerConfig(seed=args.seed, max_retries=args.max_retries,
                        tau=args.tau)
    if args.method == "additive":
        res = duplicate_additive(instance, budget=args.budget)
        alloc, retries = res.alloc, 0
        bounds = {"linf_limit": 2, "l1_limit": 2 * instance.m}
    else:
        if args.method == "entitled":
            profile = compute_mms_hat(instance, budget=args.budget)
            res = sample_entitled(instance, profile, cfg)
        else:
            profile = compute_mms(instance, budget=args.budget)
            if args.method == "monotone":
                res = sample_monotone_goods(instance, profile, cfg)
            else:
                res = dup_ordered(instance, profile, cfg)
        alloc, retries = res.alloc, res.retries
        bounds = {"linf_limit": res.linf_limit, "l1_limit": res.l1_limit}
    payload = allocation_to_dict(alloc, instance.m)
    payload["retries"] = retries
    payload["bounds"] = bounds
    return _json(payload)


def _cmd_dispose_chores(args) -> str:
    instance = _load_instance(args.instance)
    cfg = SamplerConfig(seed=args.seed, max_retries=args.max_retries)
    profile = compute_mms(instance, budget=args.budget)
    if args.method == "monotone":
        res = sample_monotone_chores(instance, profile, cfg)
        dstar, pre = 0.0, ()
    elif args.method == "ordered":
        res = ordered_chores_pipeline(instance, profile, cfg,
                                      alpha=args.alpha)
        dstar, pre = res.delta_star, res.preassigned
    else:
        res = trim_additive_chores(instance, profile, budget=args.budget)
        dstar, pre = 0.0, ()
    payload = allocation_to_dict(res.alloc, instance.m)
    payload["unassigned"] = [g for g, c in enumerate(payload["chi"]) if c == 0]
    payload["delta_star"] = float(dstar)
    payload["preassigned_agents"] = list(pre)
    return _json(payload)


def _cmd_lowerbound(args) -> str:
    rows = []
    for t in range(args.seeds):
        seed = (args.seed, t)
        if args.kind == "chores":
            inst, fam = gen_chores_lb_instance(args.n, args.m, seed)
            val, _ = min_l0_over_family(inst, fam, budget=args.budget)
        else:
            flavor = "threshold" if args.kind == "goods" else "xos"
            inst, fam = gen_goods_lb_instance(args.n, args.m, flavor, seed)
            val, _ = min_linf_over_family(inst, fam, budget=args.budget)
        rows.append((t, val))
    header = "seed,min_l0" if args.kind == "chores" else "seed,min_linf"
    return header + "\n" + "".join(f"{t},{v}\n" for t, v in rows)


def _cmd_hardness(args) -> str:
    with open(args.graph, "r", encoding="utf-8") as fh:
        graph = parse_graph(fh.read())
    red = hardness_reduce(graph, args.k)
    has_is = independent_set_exists(graph, args.k, budget=args.budget)
    has_sel = disjoint_selection_exists(red.family, budget=args.budget)
    return _json({"num_vertices": graph.num_vertices,
                  "num_edges": len(graph.edges),
                  "k": args.k,
                  "n": red.instance.n,
                  "m": red.instance.m,
                  "independent_set": has_is,
                  "disjoint_selection": has_sel,
                  "agree": has_is == has_sel})


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p]


def _cmd_experiment(args) -> str:
    methods = [p for p in args.methods.split(",") if p]
    cells = tuple(Cell(method=meth, n=n, m=m, trials=args.trials,
                       vclass=args.vclass)
                  for meth in methods
                  for n in _int_list(args.n)
                  for m in _int_list(args.m))
    config = ExperimentConfig(master_seed=args.seed, cells=cells,
                              timing=args.timing, workers=args.workers,
                              budget=args.budget)
    records = run_experiment(config)
    return trials_to_csv(records, timing=args.timing)


def _cmd_gen(args) -> str:
    instance = gen_random_instance(args.vclass, args.n, args.m, args.seed,
                                   kind=args.kind,
                                   with_entitlements=args.entitled)
    return serialize_instance(instance, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mms",
        description="Exact maximin shares, share-meeting multi-allocations "
                    "with bounded duplication or disposal, adversarial "
                    "lower bounds, and a hardness reduction.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_out(p):
        p.add_argument("--out", help="write output to this file instead of "
                                     "stdout")

    def add_budget(p):
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="abort enumerations past this many states")

    p = sub.add_parser("compute", help="exact maximin shares")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--agent", type=int, help="restrict output to one agent")
    p.add_argument("--entitled", action="store_true",
                   help="use the instance's entitlement vector")
    p.add_argument("--constrained", action="store_true",
                   help="doubled shares with copies in distinct blocks "
                        "(items reported as 2g and 2g+1)")
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("dup-goods",
                       help="goods multi-allocation with bounded duplication")
    p.add_argument("instance")
    p.add_argument("--method", required=True,
                   choices=["monotone", "ordered", "additive", "entitled"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=int, help="copy cap for the ordered method")
    p.add_argument("--max-retries", type=int)
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_dup_goods)

    p = sub.add_parser("dispose-chores",
                       help="chores multi-allocation with bounded disposal")
    p.add_argument("instance")
    p.add_argument("--method", required=True,
                   choices=["monotone", "ordered", "additive"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float,
                   help="pre-assignment threshold for the ordered method")
    p.add_argument("--max-retries", type=int)
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_dispose_chores)

    p = sub.add_parser("lowerbound",
                       help="adversarial instances and their exact optima")
    p.add_argument("--kind", required=True, choices=["goods", "xos", "chores"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seeds", type=int, default=10,
                   help="number of instances to draw")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_lowerbound)

    p = sub.add_parser("hardness",
                       help="check the reduction on one graph")
    p.add_argument("--graph", required=True,
                   help="file: first line '|V| |E|', then 'u v' per edge")
    p.add_argument("--k", type=int, required=True)
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_hardness)

    p = sub.add_parser("experiment", help="randomized pipeline sweeps")
    p.add_argument("--methods", default=",".join(METHODS),
                   help="comma list of " + " ".join(METHODS))
    p.add_argument("--n", default="2,3", help="comma list of agent counts")
    p.add_argument("--m", default="4,6", help="comma list of item counts")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--vclass", default="mixed", choices=VALUATION_CLASSES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="append a wall_time_ms column (not reproducible)")
    add_budget(p)
    add_out(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--vclass", default="mixed", choices=VALUATION_CLASSES)
    p.add_argument("--kind", default="goods", choices=["goods", "chores"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--entitled", action="store_true")
    add_out(p)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RetriesExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (MmsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
