"""Randomized experiment harness.

Builds random instances, runs one of the named pipelines on each, and
collects per-trial duplication/disposal statistics into CSV rows.  Every
trial derives its randomness from (master_seed, cell_index, trial_index),
so results are reproducible and independent of worker count; rows are
sorted by (cell, trial) before writing and timing columns are withheld
unless asked for, keeping repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .chores import ordered_chores_pipeline, sample_monotone_chores, trim_additive_chores
from .core import (
    CHORES, GOODS, Additive, EntitlementVector, Instance, OrderedComposed,
    PartitionThreshold, Table, XosPartition, char_vector,
)
from .adversarial import random_full_partition
from .errors import BudgetExceeded, RetriesExhausted
from .goods import (
    SamplerConfig, dup_ordered, duplicate_additive, sample_entitled,
    sample_monotone_goods,
)
from .rng import stream
from .shares import compute_mms, compute_mms_hat

__all__ = [
    "GOODS_METHODS", "CHORES_METHODS", "METHODS", "VALUATION_CLASSES",
    "Cell", "TrialRecord", "ExperimentConfig",
    "gen_random_instance", "random_entitlements",
    "run_trial", "run_experiment", "write_trials_csv", "trials_to_csv",
]

GOODS_METHODS = ("goods-monotone", "goods-ordered", "goods-additive",
                 "goods-entitled")
CHORES_METHODS = ("chores-monotone", "chores-ordered", "chores-additive")
METHODS = GOODS_METHODS + CHORES_METHODS

VALUATION_CLASSES = ("additive", "ordered", "threshold", "xos", "table", "mixed")

# methods with structural requirements ignore the configured class
_FORCED_CLASS = {
    "goods-ordered": "ordered",
    "goods-additive": "additive",
    "chores-ordered": "ordered",
    "chores-additive": "additive",
}

_TABLE_MAX_M = 10


def random_entitlements(n: int, rng) -> EntitlementVector:
    # offset keeps max/min <= 2, so no b_i falls below 1/(2n) and the
    # per-agent partition counts floor(1/b_i) stay enumerable
    raw = rng.random(n) + 1.0
    b = sorted((raw / raw.sum()).tolist(), reverse=True)
    return EntitlementVector(b=tuple(b))


def _random_additive(m: int, rng) -> Additive:
    return Additive(weights=tuple(float(w) for w in rng.integers(1, 101, size=m)))


def _random_ordered_agents(n: int, m: int, rng) -> tuple[OrderedComposed, ...]:
    weights = sorted((float(w) for w in rng.integers(1, 101, size=m)),
                     reverse=True)
    transforms = [("identity", "sqrt", "exp")[int(t)]
                  for t in rng.integers(0, 3, size=n)]
    if "exp" in transforms and sum(weights) > 32.0:
        # keep expm1 arguments small; same rescale for everyone preserves
        # the shared ordering
        scale = 32.0 / sum(weights)
        weights = [w * scale for w in weights]
    return tuple(OrderedComposed(weights=tuple(weights), transform=t)
                 for t in transforms)


def _random_table(m: int, rng) -> Table:
    if m > _TABLE_MAX_M:
        raise ValueError(f"table class capped at m={_TABLE_MAX_M}")
    vals = rng.random(1 << m) * 100.0
    table = [0.0] * (1 << m)
    for mask in range(1, 1 << m):
        best = 0.0
        for g in range(m):
            if mask >> g & 1:
                best = max(best, table[mask ^ (1 << g)])
        table[mask] = max(best, float(vals[mask]))
    return Table(values=tuple(table))


def gen_random_instance(vclass: str, n: int, m: int,
                        seed: int | Sequence[int], *,
                        kind: str = GOODS,
                        with_entitlements: bool = False) -> Instance:
    """Random instance of one of the named valuation classes.

    'mixed' draws each agent independently from the classes that fit the
    size (partition-based ones need m >= n, tables need small m)."""
    if vclass not in VALUATION_CLASSES:
        raise ValueError(f"unknown valuation class {vclass!r}")
    rng = stream(seed)
    if vclass == "additive":
        agents = tuple(_random_additive(m, rng) for _ in range(n))
    elif vclass == "ordered":
        agents = _random_ordered_agents(n, m, rng)
    elif vclass == "threshold":
        agents = tuple(PartitionThreshold(random_full_partition(m, n, rng))
                       for _ in range(n))
    elif vclass == "xos":
        agents = tuple(XosPartition(random_full_partition(m, n, rng))
                       for _ in range(n))
    elif vclass == "table":
        agents = tuple(_random_table(m, rng) for _ in range(n))
    else:
        pool = ["additive"]
        if m >= n:
            pool += ["threshold", "xos"]
        if m <= _TABLE_MAX_M:
            pool.append("table")
        agents = []
        for _ in range(n):
            pick = pool[int(rng.integers(0, len(pool)))]
            if pick == "additive":
                agents.append(_random_additive(m, rng))
            elif pick == "threshold":
                agents.append(PartitionThreshold(random_full_partition(m, n, rng)))
            elif pick == "xos":
                agents.append(XosPartition(random_full_partition(m, n, rng)))
            else:
                agents.append(_random_table(m, rng))
        agents = tuple(agents)
    ents = random_entitlements(n, rng) if with_entitlements else None
    return Instance(kind=kind, n=n, m=m, agents=agents, entitlements=ents)


@dataclass(frozen=True)
class Cell:
    method: str
    n: int
    m: int
    trials: int
    vclass: str = "mixed"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.vclass not in VALUATION_CLASSES:
            raise ValueError(f"unknown valuation class {self.vclass!r}")

    @property
    def effective_vclass(self) -> str:
        return _FORCED_CLASS.get(self.method, self.vclass)


@dataclass(frozen=True)
class TrialRecord:
    cell: int
    trial: int
    method: str
    n: int
    m: int
    retries: int
    l1: int
    linf: int
    l0: int
    accepted: bool
    wall_time_ms: float


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    cells: tuple[Cell, ...]
    timing: bool = False
    workers: int = 1
    budget: int | None = None


def run_trial(cell: Cell, cell_index: int, trial: int,
              master_seed: int, budget: int | None = None) -> TrialRecord:
    """One pipeline run on one fresh random instance.

    Budget and retry exhaustion are recorded as rejected trials, not
    raised; anything else propagates."""
    kind = GOODS if cell.method in GOODS_METHODS else CHORES
    instance = gen_random_instance(
        cell.effective_vclass, cell.n, cell.m,
        seed=(master_seed, cell_index, trial, 0), kind=kind,
        with_entitlements=cell.method == "goods-entitled")
    cfg = SamplerConfig(seed=(master_seed, cell_index, trial, 1))
    budget_kw = {} if budget is None else {"budget": budget}
    t0 = time.perf_counter()
    retries = 0
    try:
        if cell.method == "goods-entitled":
            profile = compute_mms_hat(instance, **budget_kw)
        else:
            profile = compute_mms(instance, **budget_kw)
        if cell.method == "goods-monotone":
            res = sample_monotone_goods(instance, profile, cfg)
            alloc, retries = res.alloc, res.retries
        elif cell.method == "goods-ordered":
            alloc = dup_ordered(instance, profile, cfg).alloc
        elif cell.method == "goods-additive":
            alloc = duplicate_additive(instance, **budget_kw).alloc
        elif cell.method == "goods-entitled":
            res = sample_entitled(instance, profile, cfg)
            alloc, retries = res.alloc, res.retries
        elif cell.method == "chores-monotone":
            res = sample_monotone_chores(instance, profile, cfg)
            alloc, retries = res.alloc, res.retries
        elif cell.method == "chores-ordered":
            res = ordered_chores_pipeline(instance, profile, cfg)
            alloc, retries = res.alloc, res.retries
        else:
            alloc = trim_additive_chores(instance, profile, **budget_kw).alloc
    except (BudgetExceeded, RetriesExhausted) as exc:
        ms = (time.perf_counter() - t0) * 1000.0
        if isinstance(exc, RetriesExhausted):
            retries = exc.retries
        return TrialRecord(cell=cell_index, trial=trial, method=cell.method,
                           n=cell.n, m=cell.m, retries=retries,
                           l1=-1, linf=-1, l0=-1, accepted=False,
                           wall_time_ms=ms)
    ms = (time.perf_counter() - t0) * 1000.0
    cv = char_vector(alloc, instance.m)
    return TrialRecord(cell=cell_index, trial=trial, method=cell.method,
                       n=cell.n, m=cell.m, retries=retries,
                       l1=cv.l1, linf=cv.linf, l0=cv.l0, accepted=True,
                       wall_time_ms=ms)


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """All trials of all cells, in deterministic (cell, trial) order
    regardless of worker count."""
    jobs = [(cell, ci, t)
            for ci, cell in enumerate(config.cells)
            for t in range(cell.trials)]
    if config.workers <= 1:
        records = [run_trial(cell, ci, t, config.master_seed, config.budget)
                   for cell, ci, t in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futs = {pool.submit(run_trial, cell, ci, t, config.master_seed,
                                config.budget): (ci, t)
                    for cell, ci, t in jobs}
            records = [f.result() for f in futs]
    return sorted(records, key=lambda r: (r.cell, r.trial))


_CSV_FIELDS = ("cell", "trial", "method", "n", "m",
               "retries", "l1", "linf", "l0", "accepted")


def trials_to_csv(records: Sequence[TrialRecord], *, timing: bool = False) -> str:
    out = io.StringIO()
    fields = _CSV_FIELDS + (("wall_time_ms",) if timing else ())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        row = [r.cell, r.trial, r.method, r.n, r.m, r.retries,
               r.l1, r.linf, r.l0, int(r.accepted)]
        if timing:
            row.append(f"{r.wall_time_ms:.3f}")
        w.writerow(row)
    return out.getvalue()


def write_trials_csv(records: Sequence[TrialRecord], path: str, *,
                     timing: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trials_to_csv(records, timing=timing))
