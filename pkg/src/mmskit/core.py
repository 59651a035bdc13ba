"""Instances, valuations and the basic checks everything else builds on.

An :class:`Instance` is ``n`` agents with set functions over ``m`` items
(0-indexed).  ``kind`` says whether items are goods (more is better) or
chores (less is better).  Bundles are canonical sorted duplicate-free
tuples of item indices; a multi-allocation is one bundle per agent and is
allowed to duplicate items across bundles or leave items out.

Valuation variants:

- ``Additive(weights)``: v(S) = sum of weights over S.
- ``OrderedComposed(weights, transform)``: f(sum of weights over S) with
  weights nonincreasing by index and f in {identity, sqrt, exp}; exp is
  implemented as expm1 so that v(empty) = 0 holds.
- ``PartitionThreshold(blocks)``: 1 if S contains some block, else 0.
- ``XosPartition(blocks)``: max over blocks of |S & B| / |B|.
- ``Table(values)``: explicit value per bitmask (bit g = item g), m <= 16.
- ``BlockContainmentCost(blocks)``: 0 if S fits inside one block, else 1
  (a chore-side mirror of PartitionThreshold).

All float comparisons in this package use an absolute tolerance of 1e-9
and every logarithm is base 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InstanceFormatError

TOL = 1e-9
GOODS = "goods"
CHORES = "chores"
TABLE_MAX_ITEMS = 16

Bundle = tuple[int, ...]

__all__ = [
    "TOL", "GOODS", "CHORES", "TABLE_MAX_ITEMS", "Bundle",
    "Additive", "OrderedComposed", "PartitionThreshold", "XosPartition",
    "Table", "BlockContainmentCost", "ValuationSpec",
    "EntitlementVector", "Instance", "MultiAllocation", "CharVector",
    "MmsProfile", "DoubledMmsProfile",
    "canonical_bundle", "bundle_mask", "spec_value", "spec_table",
    "char_vector", "check_monotone", "check_identically_ordered",
    "verify_mms", "parse_instance", "serialize_instance",
    "instance_to_dict", "instance_from_dict",
    "allocation_to_dict", "allocation_from_dict",
]


def canonical_bundle(items: Iterable[int], m: int) -> Bundle:
    """Sorted duplicate-free tuple of item indices in range(m)."""
    out = tuple(sorted(items))
    for g in out:
        if not isinstance(g, int) or isinstance(g, bool) or not 0 <= g < m:
            raise ValueError(f"item {g!r} outside range(0, {m})")
    if any(a == b for a, b in zip(out, out[1:])):
        raise ValueError(f"duplicate item in bundle {out}")
    return out


def bundle_mask(bundle: Iterable[int]) -> int:
    mask = 0
    for g in bundle:
        mask |= 1 << g
    return mask


def _check_blocks(blocks, m: int, what: str) -> tuple[Bundle, ...]:
    """Validate that blocks are nonempty and partition range(m)."""
    canon = tuple(canonical_bundle(b, m) for b in blocks)
    seen: set[int] = set()
    for b in canon:
        if not b:
            raise ValueError(f"{what}: empty block not allowed")
        if seen.intersection(b):
            raise ValueError(f"{what}: blocks overlap")
        seen.update(b)
    if len(seen) != m:
        raise ValueError(f"{what}: blocks must cover all {m} items")
    return canon


@dataclass(frozen=True)
class Additive:
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if any(w < 0 for w in self.weights):
            raise ValueError("additive weights must be nonnegative")


_TRANSFORMS = ("identity", "sqrt", "exp")


@dataclass(frozen=True)
class OrderedComposed:
    weights: tuple[float, ...]
    transform: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if any(w < 0 for w in self.weights):
            raise ValueError("ordered weights must be nonnegative")
        if any(a < b - TOL for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("ordered weights must be nonincreasing by index")
        if self.transform not in _TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")

    def apply(self, total: float) -> float:
        if self.transform == "identity":
            return total
        if self.transform == "sqrt":
            return math.sqrt(total)
        return math.expm1(total)


@dataclass(frozen=True)
class PartitionThreshold:
    blocks: tuple[Bundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks",
                           tuple(tuple(b) for b in self.blocks))


@dataclass(frozen=True)
class XosPartition:
    blocks: tuple[Bundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks",
                           tuple(tuple(b) for b in self.blocks))


@dataclass(frozen=True)
class Table:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class BlockContainmentCost:
    blocks: tuple[Bundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks",
                           tuple(tuple(b) for b in self.blocks))


ValuationSpec = Union[Additive, OrderedComposed, PartitionThreshold,
                      XosPartition, Table, BlockContainmentCost]


def _validate_spec(spec: ValuationSpec, m: int, where: str) -> None:
    if isinstance(spec, (Additive, OrderedComposed)):
        if len(spec.weights) != m:
            raise ValueError(f"{where}: expected {m} weights, "
                             f"got {len(spec.weights)}")
    elif isinstance(spec, (PartitionThreshold, XosPartition,
                           BlockContainmentCost)):
        _check_blocks(spec.blocks, m, where)
    elif isinstance(spec, Table):
        if m > TABLE_MAX_ITEMS:
            raise ValueError(f"{where}: table valuations support at most "
                             f"{TABLE_MAX_ITEMS} items, got {m}")
        if len(spec.values) != 1 << m:
            raise ValueError(f"{where}: table needs {1 << m} values, "
                             f"got {len(spec.values)}")
        if not check_monotone(spec, m):
            raise ValueError(f"{where}: table is not a normalized "
                             "monotone set function")
    else:
        raise ValueError(f"{where}: unknown valuation spec {type(spec)}")


def spec_value(spec: ValuationSpec, bundle: Iterable[int], m: int) -> float:
    """Evaluate one valuation on a bundle. v(empty) = 0 for every variant."""
    items = tuple(bundle)
    if isinstance(spec, Additive):
        return float(sum(spec.weights[g] for g in items))
    if isinstance(spec, OrderedComposed):
        return float(spec.apply(sum(spec.weights[g] for g in items)))
    if isinstance(spec, PartitionThreshold):
        s = set(items)
        return 1.0 if any(s.issuperset(b) for b in spec.blocks) else 0.0
    if isinstance(spec, XosPartition):
        s = set(items)
        return max((len(s.intersection(b)) / len(b) for b in spec.blocks),
                   default=0.0)
    if isinstance(spec, Table):
        return float(spec.values[bundle_mask(items)])
    if isinstance(spec, BlockContainmentCost):
        s = set(items)
        return 0.0 if any(s.issubset(b) for b in spec.blocks) else 1.0
    raise TypeError(f"unknown valuation spec {type(spec)}")


def spec_table(spec: ValuationSpec, m: int) -> np.ndarray:
    """Compile a valuation into a dense 2^m value table (bit g = item g)."""
    if m > TABLE_MAX_ITEMS:
        raise ValueError(f"value tables support at most {TABLE_MAX_ITEMS} "
                         f"items, got {m}")
    size = 1 << m
    if isinstance(spec, Table):
        return np.asarray(spec.values, dtype=np.float64)
    if isinstance(spec, (Additive, OrderedComposed)):
        table = np.zeros(size, dtype=np.float64)
        w = spec.weights
        for g in range(m):
            bit = 1 << g
            half = table[:bit]
            table[bit:2 * bit] = half + w[g]
        if isinstance(spec, OrderedComposed) and spec.transform != "identity":
            f = np.vectorize(spec.apply)
            table = f(table).astype(np.float64)
        return table
    masks = np.arange(size, dtype=np.int64)
    if isinstance(spec, PartitionThreshold):
        table = np.zeros(size, dtype=np.float64)
        for b in spec.blocks:
            bm = bundle_mask(b)
            table[(masks & bm) == bm] = 1.0
        return table
    if isinstance(spec, XosPartition):
        table = np.zeros(size, dtype=np.float64)
        for b in spec.blocks:
            bm = bundle_mask(b)
            inter = masks & bm
            counts = np.zeros(size, dtype=np.int64)
            for g in b:
                counts += (inter >> g) & 1
            np.maximum(table, counts / len(b), out=table)
        return table
    if isinstance(spec, BlockContainmentCost):
        table = np.ones(size, dtype=np.float64)
        for b in spec.blocks:
            bm = bundle_mask(b)
            table[(masks & ~bm) == 0] = 0.0
        return table
    raise TypeError(f"unknown valuation spec {type(spec)}")


def check_monotone(spec: ValuationSpec, m: int) -> bool:
    """Exhaustively confirm v(empty)=0, v >= 0 and monotonicity (m <= 16)."""
    table = spec_table(spec, m)
    if abs(table[0]) > TOL or np.any(table < -TOL):
        return False
    for g in range(m):
        bit = 1 << g
        without = np.arange(1 << m, dtype=np.int64)
        without = without[(without & bit) == 0]
        if np.any(table[without | bit] < table[without] - TOL):
            return False
    return True


@dataclass(frozen=True)
class EntitlementVector:
    """Agent entitlements b, indexed so b[0] >= b[1] >= ... and sum(b) = 1."""

    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if not self.b:
            raise ValueError("entitlements must be nonempty")
        if any(x <= 0 or x > 1 + TOL for x in self.b):
            raise ValueError("entitlements must lie in (0, 1]")
        if any(a < b - TOL for a, b in zip(self.b, self.b[1:])):
            raise ValueError("entitlements must be sorted nonincreasing")
        if abs(sum(self.b) - 1.0) > TOL:
            raise ValueError(f"entitlements must sum to 1, got {sum(self.b)}")

    @property
    def n_parts(self) -> tuple[int, ...]:
        """n_i = floor(1 / b_i); the small slack absorbs decimal reciprocals
        like 1/0.2 that round just below the intended integer."""
        return tuple(max(1, int(math.floor(1.0 / x + TOL))) for x in self.b)


@dataclass(frozen=True)
class Instance:
    kind: str
    n: int
    m: int
    agents: tuple[ValuationSpec, ...]
    entitlements: EntitlementVector | None = None

    def __post_init__(self):
        if self.kind not in (GOODS, CHORES):
            raise ValueError(f"kind must be goods or chores, got {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        object.__setattr__(self, "agents", tuple(self.agents))
        if len(self.agents) != self.n:
            raise ValueError(f"expected {self.n} agent specs, "
                             f"got {len(self.agents)}")
        for i, spec in enumerate(self.agents):
            _validate_spec(spec, self.m, f"agents[{i}]")
        if self.entitlements is not None:
            if len(self.entitlements.b) != self.n:
                raise ValueError("entitlements length must equal n")

    def value(self, agent: int, bundle: Iterable[int]) -> float:
        return spec_value(self.agents[agent], bundle, self.m)


@dataclass(frozen=True)
class MultiAllocation:
    """One bundle per agent; items may repeat across bundles or be left out."""

    bundles: tuple[Bundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles",
                           tuple(tuple(b) for b in self.bundles))

    def __len__(self) -> int:
        return len(self.bundles)

    def __getitem__(self, i: int) -> Bundle:
        return self.bundles[i]


@dataclass(frozen=True)
class CharVector:
    """Copy counts chi_g plus the three norms read off them."""

    counts: tuple[int, ...]
    l1: int
    linf: int
    l0: int


def char_vector(alloc: MultiAllocation | Sequence[Sequence[int]],
                m: int) -> CharVector:
    bundles = alloc.bundles if isinstance(alloc, MultiAllocation) else alloc
    counts = [0] * m
    for b in bundles:
        for g in b:
            counts[g] += 1
    return CharVector(counts=tuple(counts),
                      l1=sum(counts),
                      linf=max(counts) if m else 0,
                      l0=sum(1 for c in counts if c == 0))


@dataclass(frozen=True)
class MmsProfile:
    """Per-agent maximin share values and one inducing partition each.

    Inducing partitions are block lists (empty blocks allowed); for agent i
    of a goods instance every block of ``inducing[i]`` is worth >= mu[i] to
    agent i, for chores every block costs <= mu[i].
    """

    mu: tuple[float, ...]
    inducing: tuple[tuple[Bundle, ...], ...]


DoubledBlock = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class DoubledMmsProfile:
    """Constrained shares of the two-copy instance; blocks hold (g, copy)
    pairs with copy in {1, 2} and never both copies of one good."""

    mu: tuple[float, ...]
    inducing: tuple[tuple[DoubledBlock, ...], ...]


def check_identically_ordered(instance: Instance) -> bool:
    """True iff item index order is a common preference order for everyone:
    for all s < t and S avoiding both, v(S + g_s) >= v(S + g_t)."""
    for spec in instance.agents:
        if isinstance(spec, (Additive, OrderedComposed)):
            w = spec.weights
            if any(w[s] < w[t] - TOL
                   for s in range(instance.m - 1)
                   for t in range(s + 1, instance.m)):
                return False
            continue
        if instance.m > TABLE_MAX_ITEMS:
            raise ValueError("exhaustive order check needs m <= 16")
        table = spec_table(spec, instance.m)
        masks = np.arange(1 << instance.m, dtype=np.int64)
        for s in range(instance.m - 1):
            for t in range(s + 1, instance.m):
                free = masks[(masks & ((1 << s) | (1 << t))) == 0]
                if np.any(table[free | (1 << s)]
                          < table[free | (1 << t)] - TOL):
                    return False
    return True


def verify_mms(instance: Instance, profile: MmsProfile,
               alloc: MultiAllocation) -> bool:
    """Does every agent's bundle meet their maximin share (tolerance 1e-9)?"""
    if len(profile.mu) != instance.n or len(alloc.bundles) != instance.n:
        raise ValueError("profile/allocation length must equal n")
    for i in range(instance.n):
        v = instance.value(i, alloc.bundles[i])
        if instance.kind == GOODS:
            if v < profile.mu[i] - TOL:
                return False
        else:
            if v > profile.mu[i] + TOL:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

_SPEC_TAGS = {
    Additive: "additive",
    OrderedComposed: "ordered",
    PartitionThreshold: "partition_threshold",
    XosPartition: "xos_partition",
    Table: "table",
    BlockContainmentCost: "block_containment",
}


def _spec_to_dict(spec: ValuationSpec) -> dict:
    tag = _SPEC_TAGS[type(spec)]
    if isinstance(spec, Additive):
        return {"type": tag, "weights": list(spec.weights)}
    if isinstance(spec, OrderedComposed):
        return {"type": tag, "weights": list(spec.weights),
                "transform": spec.transform}
    if isinstance(spec, Table):
        return {"type": tag, "values": list(spec.values)}
    return {"type": tag, "blocks": [list(b) for b in spec.blocks]}


def _require(cond: bool, where: str, msg: str) -> None:
    if not cond:
        raise InstanceFormatError(f"{where}: {msg}")


def _num_list(obj, where: str) -> list:
    _require(isinstance(obj, list), where, "expected a list of numbers")
    for k, x in enumerate(obj):
        _require(isinstance(x, (int, float)) and not isinstance(x, bool),
                 f"{where}[{k}]", "expected a number")
    return list(obj)


def _spec_from_dict(obj, m: int, where: str) -> ValuationSpec:
    _require(isinstance(obj, dict), where, "expected an object")
    tag = obj.get("type")
    try:
        if tag == "additive":
            return Additive(tuple(_num_list(obj.get("weights"),
                                            f"{where}.weights")))
        if tag == "ordered":
            transform = obj.get("transform", "identity")
            _require(transform in _TRANSFORMS, f"{where}.transform",
                     f"expected one of {_TRANSFORMS}")
            return OrderedComposed(tuple(_num_list(obj.get("weights"),
                                                   f"{where}.weights")),
                                   transform)
        if tag == "table":
            return Table(tuple(_num_list(obj.get("values"),
                                         f"{where}.values")))
        if tag in ("partition_threshold", "xos_partition",
                   "block_containment"):
            blocks = obj.get("blocks")
            _require(isinstance(blocks, list), f"{where}.blocks",
                     "expected a list of blocks")
            parsed = tuple(tuple(_num_list(b, f"{where}.blocks[{j}]"))
                           for j, b in enumerate(blocks))
            cls = {"partition_threshold": PartitionThreshold,
                   "xos_partition": XosPartition,
                   "block_containment": BlockContainmentCost}[tag]
            return cls(parsed)
    except InstanceFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc
    raise InstanceFormatError(f"{where}.type: unknown spec type {tag!r}")


def instance_from_dict(obj: dict) -> Instance:
    _require(isinstance(obj, dict), "$", "expected a JSON object")
    for key in ("kind", "n", "m", "agents"):
        _require(key in obj, "$", f"missing field {key!r}")
    kind, n, m = obj["kind"], obj["n"], obj["m"]
    _require(kind in (GOODS, CHORES), "kind", "expected 'goods' or 'chores'")
    _require(isinstance(n, int) and n >= 1, "n", "expected an integer >= 1")
    _require(isinstance(m, int) and m >= 1, "m", "expected an integer >= 1")
    agents_obj = obj["agents"]
    _require(isinstance(agents_obj, list) and len(agents_obj) == n,
             "agents", f"expected a list of {n} valuation specs")
    agents = tuple(_spec_from_dict(a, m, f"agents[{i}]")
                   for i, a in enumerate(agents_obj))
    ent = None
    if obj.get("entitlements") is not None:
        try:
            ent = EntitlementVector(tuple(_num_list(obj["entitlements"],
                                                    "entitlements")))
        except ValueError as exc:
            raise InstanceFormatError(f"entitlements: {exc}") from exc
    try:
        return Instance(kind=kind, n=n, m=m, agents=agents, entitlements=ent)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def instance_to_dict(instance: Instance) -> dict:
    out = {"kind": instance.kind, "n": instance.n, "m": instance.m,
           "agents": [_spec_to_dict(s) for s in instance.agents]}
    if instance.entitlements is not None:
        out["entitlements"] = list(instance.entitlements.b)
    return out


def parse_instance(text: str | bytes | dict) -> Instance:
    if isinstance(text, dict):
        return instance_from_dict(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON at line {exc.lineno} "
                                  f"column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(obj)


def serialize_instance(instance: Instance, indent: int | None = None) -> str:
    return json.dumps(instance_to_dict(instance), indent=indent)


def allocation_to_dict(alloc: MultiAllocation, m: int) -> dict:
    cv = char_vector(alloc, m)
    return {"bundles": [list(b) for b in alloc.bundles],
            "chi": list(cv.counts),
            "l1": cv.l1, "linf": cv.linf, "l0": cv.l0}


def allocation_from_dict(obj: dict, m: int) -> MultiAllocation:
    _require(isinstance(obj, dict) and isinstance(obj.get("bundles"), list),
             "$", "expected an object with a 'bundles' list")
    bundles = tuple(canonical_bundle(b, m) for b in obj["bundles"])
    return MultiAllocation(bundles=bundles)
