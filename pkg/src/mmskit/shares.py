"""Exact maximin share computation by ordered-assignment enumeration.

Shares are computed per agent over all n^m assignments of items to
blocks (block symmetry is deliberately not factored out; a budget guard
refuses anything above ``budget`` states).  Goods take the max-min block
value, chores the min-max block cost, and among optimal partitions the
one reached by the lexicographically smallest assignment vector is
returned, so results are fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .core import (
    CHORES, GOODS, TABLE_MAX_ITEMS, Additive, Bundle, DoubledMmsProfile,
    EntitlementVector, Instance, MmsProfile, OrderedComposed, spec_table,
)
from .errors import BudgetExceeded

DEFAULT_BUDGET = 10 ** 8

__all__ = ["DEFAULT_BUDGET", "maximin_share", "compute_mms",
           "compute_mms_hat", "compute_constrained_mms",
           "blocks_from_assignment"]


def blocks_from_assignment(assign, n_blocks: int) -> tuple[Bundle, ...]:
    """Group item indices by their assigned block."""
    blocks: list[list[int]] = [[] for _ in range(n_blocks)]
    for g, j in enumerate(assign):
        blocks[j].append(g)
    return tuple(tuple(sorted(b)) for b in blocks)


def maximin_share(instance: Instance, agent: int, *,
                  n_blocks: int | None = None,
                  budget: int = DEFAULT_BUDGET) -> tuple[float, tuple[Bundle, ...]]:
    """One agent's maximin share over ``n_blocks``-partitions (default n).

    Returns ``(mu, partition)``; the partition may contain empty blocks.
    """
    k = instance.n if n_blocks is None else n_blocks
    if k < 1:
        raise ValueError("need at least one block")
    states = k ** instance.m
    if states > budget:
        raise BudgetExceeded(states, budget, "share enumeration")
    maximize = instance.kind == GOODS
    spec = instance.agents[agent]
    if isinstance(spec, (Additive, OrderedComposed)):
        # optimize in sum space; the transforms are strictly increasing
        val, assign = kernels.assign_opt_additive(list(spec.weights), k,
                                                  maximize)
        mu = spec.apply(val) if isinstance(spec, OrderedComposed) else val
    else:
        if instance.m > TABLE_MAX_ITEMS:
            raise ValueError(f"non-additive shares need m <= "
                             f"{TABLE_MAX_ITEMS}, got {instance.m}")
        table = spec_table(spec, instance.m)
        mu, assign = kernels.assign_opt_table(table, k, instance.m, maximize)
    return float(mu), blocks_from_assignment(assign, k)


def compute_mms(instance: Instance, *,
                budget: int = DEFAULT_BUDGET) -> MmsProfile:
    """Maximin shares and one inducing partition for every agent."""
    mu: list[float] = []
    inducing: list[tuple[Bundle, ...]] = []
    for i in range(instance.n):
        v, part = maximin_share(instance, i, budget=budget)
        mu.append(v)
        inducing.append(part)
    return MmsProfile(mu=tuple(mu), inducing=tuple(inducing))


def compute_mms_hat(instance: Instance,
                    entitlements: EntitlementVector | None = None, *,
                    budget: int = DEFAULT_BUDGET) -> MmsProfile:
    """Entitlement shares: agent i gets their n_i-partition maximin value,
    n_i = floor(1 / b_i)."""
    ent = entitlements if entitlements is not None else instance.entitlements
    if ent is None:
        raise ValueError("instance has no entitlements")
    if len(ent.b) != instance.n:
        raise ValueError("entitlements length must equal n")
    mu: list[float] = []
    inducing: list[tuple[Bundle, ...]] = []
    for i, n_i in enumerate(ent.n_parts):
        v, part = maximin_share(instance, i, n_blocks=n_i, budget=budget)
        mu.append(v)
        inducing.append(part)
    return MmsProfile(mu=tuple(mu), inducing=tuple(inducing))


def compute_constrained_mms(instance: Instance, *,
                            budget: int = DEFAULT_BUDGET) -> DoubledMmsProfile:
    """Shares of the doubled instance: every good exists in two copies and
    no block may hold both copies of one good.

    Needs an additive goods instance with n >= 2 (with a single agent no
    block structure can separate the two copies).  The returned value is
    guaranteed >= 2x the plain share; blocks hold (good, copy) pairs.
    """
    if instance.kind != GOODS:
        raise ValueError("constrained shares are defined for goods")
    if instance.n < 2:
        raise ValueError("constrained shares need n >= 2: with one agent "
                         "the two copies of a good cannot be separated")
    for i, spec in enumerate(instance.agents):
        if not isinstance(spec, Additive):
            raise ValueError(f"agents[{i}]: constrained shares need "
                             "additive valuations")
    states = instance.n ** (2 * instance.m)
    if states > budget:
        raise BudgetExceeded(states, budget, "doubled enumeration")
    mu: list[float] = []
    inducing = []
    for i in range(instance.n):
        val, assign = kernels.constrained_opt_additive(
            list(instance.agents[i].weights), instance.n)
        if assign is None:
            raise ValueError("no feasible doubled partition exists")
        blocks: list[list[tuple[int, int]]] = [[] for _ in range(instance.n)]
        for d, j in enumerate(assign):
            blocks[j].append((d >> 1, (d & 1) + 1))
        mu.append(float(val))
        inducing.append(tuple(tuple(sorted(b)) for b in blocks))
    return DoubledMmsProfile(mu=tuple(mu), inducing=tuple(inducing))
