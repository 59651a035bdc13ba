"""Adversarial instances: share lower bounds and a hardness reduction.

The lower-bound generators draw one uniform ordered partition per agent
(each item to a uniform block, redrawn until no block is empty) and wrap
them in partition-based valuations whose maximin share is exactly 1 for
goods and exactly 0 for chores.  The interesting quantity is then the
best achievable linf (goods) or l0 (chores) over the selection family:
all n^n ways of giving every agent one of their own blocks.

``hardness_reduce`` maps an independent-set question to exactly that
kind of selection problem: a disjoint selection of the constructed
partitions exists iff the graph has an independent set of size k.
Both sides are decided by exhaustive search at desk scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import kernels
from .core import (
    CHORES, GOODS, BlockContainmentCost, Bundle, Instance,
    PartitionThreshold, XosPartition,
)
from .errors import BudgetExceeded, InstanceFormatError
from .rng import stream

__all__ = [
    "SelectionFamily", "Graph", "HardnessReduction",
    "gen_goods_lb_instance", "gen_chores_lb_instance",
    "min_linf_over_family", "min_l0_over_family",
    "random_full_partition", "parse_graph", "serialize_graph",
    "hardness_reduce", "iter_disjoint_selections",
    "disjoint_selection_exists", "independent_set_exists",
]

DEFAULT_BUDGET = 10 ** 8


@dataclass(frozen=True)
class SelectionFamily:
    """One n-block partition per agent; a selection picks one block each."""

    partitions: tuple[tuple[Bundle, ...], ...]

    @property
    def n(self) -> int:
        return len(self.partitions)

    def selections(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(len(p)) for p in self.partitions))


def random_full_partition(m: int, n_blocks: int, rng) -> tuple[Bundle, ...]:
    """Uniform item-to-block partition conditioned on no empty block."""
    if m < n_blocks:
        raise ValueError(f"cannot fill {n_blocks} blocks with {m} items")
    while True:
        assign = rng.integers(0, n_blocks, size=m)
        blocks: list[list[int]] = [[] for _ in range(n_blocks)]
        for g, j in enumerate(assign):
            blocks[int(j)].append(g)
        if all(blocks):
            return tuple(tuple(b) for b in blocks)


def gen_goods_lb_instance(n: int, m: int, flavor: str,
                          seed: int | Sequence[int]) -> tuple[Instance, SelectionFamily]:
    """Goods instance with mu_i = 1 for everyone: each agent values a
    bundle by their random partition, either hitting 1 when the bundle
    contains a full block (flavor 'threshold') or growing fractionally
    with the best-covered block (flavor 'xos')."""
    if n < 2 or m < n:
        raise ValueError("need n >= 2 and m >= n")
    if flavor not in ("threshold", "xos"):
        raise ValueError(f"unknown flavor {flavor!r}")
    rng = stream(seed)
    partitions = tuple(random_full_partition(m, n, rng) for _ in range(n))
    cls = PartitionThreshold if flavor == "threshold" else XosPartition
    instance = Instance(kind=GOODS, n=n, m=m,
                        agents=tuple(cls(p) for p in partitions))
    return instance, SelectionFamily(partitions=partitions)


def gen_chores_lb_instance(n: int, m: int,
                           seed: int | Sequence[int]) -> tuple[Instance, SelectionFamily]:
    """Chores instance with mu_i = 0 for everyone: a bundle costs nothing
    exactly when it stays inside a single block of the agent's random
    partition."""
    if n < 2 or m < n:
        raise ValueError("need n >= 2 and m >= n")
    rng = stream(seed)
    partitions = tuple(random_full_partition(m, n, rng) for _ in range(n))
    instance = Instance(kind=CHORES, n=n, m=m,
                        agents=tuple(BlockContainmentCost(p)
                                     for p in partitions))
    return instance, SelectionFamily(partitions=partitions)


def _check_family_budget(family: SelectionFamily, budget: int) -> None:
    states = 1
    for p in family.partitions:
        states *= len(p)
    if states > budget:
        raise BudgetExceeded(states, budget, "selection scan")


def min_linf_over_family(instance: Instance, family: SelectionFamily, *,
                         budget: int = DEFAULT_BUDGET) -> tuple[int, tuple[int, ...]]:
    """Exact minimum of linf over all selections, with its lex-first
    argmin.  The minimum for the threshold/xos generators is reported,
    never assumed."""
    _check_family_budget(family, budget)
    block_items = [[list(b) for b in parts] for parts in family.partitions]
    val, sel = kernels.min_linf_selection(block_items, instance.m)
    return int(val), tuple(int(j) for j in sel)


def min_l0_over_family(instance: Instance, family: SelectionFamily, *,
                       budget: int = DEFAULT_BUDGET) -> tuple[int, tuple[int, ...]]:
    """Exact minimum of l0 over all selections, with its lex-first argmin."""
    _check_family_budget(family, budget)
    block_items = [[list(b) for b in parts] for parts in family.partitions]
    val, sel = kernels.min_l0_selection(block_items, instance.m)
    return int(val), tuple(int(j) for j in sel)


# ---------------------------------------------------------------------------
# independent set -> disjoint selection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..num_vertices-1."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        canon = []
        for e in self.edges:
            u, v = e
            if not (0 <= u < self.num_vertices
                    and 0 <= v < self.num_vertices) or u == v:
                raise ValueError(f"bad edge {e}")
            u, v = min(u, v), max(u, v)
            if (u, v) in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add((u, v))
            canon.append((u, v))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in set(self.edges)


def parse_graph(text: str) -> Graph:
    """First line ``|V| |E|``, then one ``u v`` line per edge (0-indexed)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InstanceFormatError("graph file is empty")
    try:
        nv, ne = map(int, lines[0].split())
    except ValueError as exc:
        raise InstanceFormatError(f"graph header: {exc}") from exc
    if len(lines) - 1 != ne:
        raise InstanceFormatError(f"graph header promises {ne} edges, "
                                  f"file has {len(lines) - 1}")
    edges = []
    for k, ln in enumerate(lines[1:]):
        try:
            u, v = map(int, ln.split())
        except ValueError as exc:
            raise InstanceFormatError(f"graph edge line {k + 2}: {exc}") from exc
        edges.append((u, v))
    try:
        return Graph(num_vertices=nv, edges=tuple(edges))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def serialize_graph(graph: Graph) -> str:
    lines = [f"{graph.num_vertices} {len(graph.edges)}"]
    lines += [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HardnessReduction:
    """Output of the reduction: the partitions (one per agent), the same
    data wrapped as a threshold-goods instance, and labels for the goods.

    Goods 0..len(tuple_sets)-1 are the pair goods (good s demanded by
    both members of tuple_sets[s]); the last |V| goods are the vertex
    goods h_u."""

    graph: Graph
    k: int
    instance: Instance
    family: SelectionFamily
    tuple_sets: tuple[tuple[tuple[int, int], ...], ...]


def hardness_reduce(graph: Graph, k: int) -> HardnessReduction:
    """Build the selection instance whose disjoint selections correspond
    to independent sets of size k.

    Agents 0..k-1 partition the pair goods by which vertex their tuple
    uses; picking vertex u for two such agents collides on a pair good
    whenever u is repeated or the two vertices are adjacent.  The last
    |V|+1-k agents only care about the vertex goods, forcing the first k
    agents to actually commit to vertices.
    """
    nv = graph.num_vertices
    if not 2 <= k <= nv:
        raise ValueError(f"need 2 <= k <= |V|, got k={k}, |V|={nv}")
    n = nv + 1
    index_pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    tuple_sets: list[tuple[tuple[int, int], ...]] = []
    for u in range(nv):
        for i, j in index_pairs:
            tuple_sets.append(((i, u), (j, u)))
    for u, v in graph.edges:
        for i, j in index_pairs:
            tuple_sets.append(((i, u), (j, v)))
            tuple_sets.append(((i, v), (j, u)))
    num_pair_goods = len(tuple_sets)
    m = num_pair_goods + nv

    def h(u: int) -> int:
        return num_pair_goods + u

    partitions = []
    for i in range(k):
        used = set()
        blocks = []
        for u in range(nv):
            block = [s for s, members in enumerate(tuple_sets)
                     if (i, u) in members]
            used.update(block)
            blocks.append(tuple(block))
        rest = [g for g in range(num_pair_goods) if g not in used]
        blocks.append(tuple(rest + [h(u) for u in range(nv)]))
        partitions.append(tuple(blocks))
    vertex_good_blocks = tuple([(h(u),) for u in range(nv)]
                               + [tuple(range(num_pair_goods))])
    for _ in range(k, n):
        partitions.append(vertex_good_blocks)
    family = SelectionFamily(partitions=tuple(partitions))
    instance = Instance(kind=GOODS, n=n, m=m,
                        agents=tuple(PartitionThreshold(p)
                                     for p in partitions))
    return HardnessReduction(graph=graph, k=k, instance=instance,
                             family=family, tuple_sets=tuple(tuple_sets))


def iter_disjoint_selections(family: SelectionFamily, *,
                             budget: int = DEFAULT_BUDGET) -> Iterator[tuple[int, ...]]:
    """All selections with pairwise disjoint blocks, in lex order.

    Prunes on pairwise intersections; the budget caps visited search
    nodes, not the full n^n space.
    """
    n = family.n
    sets = [[frozenset(b) for b in parts] for parts in family.partitions]
    compatible = {}
    for i in range(n):
        for i2 in range(i + 1, n):
            for j, b in enumerate(sets[i]):
                for j2, b2 in enumerate(sets[i2]):
                    compatible[(i, j, i2, j2)] = b.isdisjoint(b2)
    select = [0] * n
    nodes = 0

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(nodes, budget, "disjoint selection search")
        if i == n:
            yield tuple(select)
            return
        for j in range(len(sets[i])):
            if all(compatible[(i2, select[i2], i, j)] for i2 in range(i)):
                select[i] = j
                yield from rec(i + 1)
        select[i] = 0

    return rec(0)


def disjoint_selection_exists(family: SelectionFamily, *,
                              budget: int = DEFAULT_BUDGET) -> bool:
    return next(iter_disjoint_selections(family, budget=budget), None) is not None


def independent_set_exists(graph: Graph, k: int, *,
                           budget: int = DEFAULT_BUDGET) -> bool:
    """Exhaustive independent-set check (desk scale, |V| <= 8)."""
    nv = graph.num_vertices
    if math.comb(nv, k) > budget:
        raise BudgetExceeded(math.comb(nv, k), budget, "independent set scan")
    adj = set(graph.edges)
    for combo in itertools.combinations(range(nv), k):
        if all((u, v) not in adj
               for u, v in itertools.combinations(combo, 2)):
            return True
    return False
