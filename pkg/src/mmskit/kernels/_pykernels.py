"""Pure-Python enumeration kernels.

Reference implementations of the hot loops; the compiled module in
``_ckernels.pyx`` mirrors these function-for-function.  Every kernel
enumerates assignment vectors in lexicographic order (item 0 varies
slowest) and keeps the first optimum, so ties always resolve to the
lexicographically smallest vector.  Callers are responsible for budget
guards; kernels just enumerate.
"""

from __future__ import annotations

INF = float("inf")
TOL = 1e-9

BACKEND_NAME = "pure"


def assign_opt_table(table, n: int, m: int, maximize_min: bool):
    """Best ordered n-assignment of m items scored by a 2^m value table.

    Returns ``(value, assignment)`` where value is max-min (goods) or
    min-max (chores) over blocks and assignment maps item -> block.
    """
    masks = [0] * n
    assign = [0] * m
    best_val = -INF if maximize_min else INF
    best_assign = list(assign)

    def rec(g: int) -> None:
        nonlocal best_val, best_assign
        if g == m:
            if maximize_min:
                val = min(table[mk] for mk in masks)
                if val > best_val:
                    best_val, best_assign = val, assign.copy()
            else:
                val = max(table[mk] for mk in masks)
                if val < best_val:
                    best_val, best_assign = val, assign.copy()
            return
        bit = 1 << g
        for j in range(n):
            masks[j] |= bit
            assign[g] = j
            rec(g + 1)
            masks[j] &= ~bit
        assign[g] = 0

    rec(0)
    return best_val, best_assign


def assign_opt_additive(weights, n: int, maximize_min: bool):
    """Same contract as assign_opt_table for additive weights (any m)."""
    m = len(weights)
    sums = [0.0] * n
    assign = [0] * m
    best_val = -INF if maximize_min else INF
    best_assign = list(assign)

    def rec(g: int) -> None:
        nonlocal best_val, best_assign
        if g == m:
            if maximize_min:
                val = min(sums)
                if val > best_val:
                    best_val, best_assign = val, assign.copy()
            else:
                val = max(sums)
                if val < best_val:
                    best_val, best_assign = val, assign.copy()
            return
        w = weights[g]
        for j in range(n):
            # save/restore instead of -=: subtracting w back can drift by
            # an ulp and break exact ties between relabeled partitions
            prev = sums[j]
            sums[j] = prev + w
            assign[g] = j
            rec(g + 1)
            sums[j] = prev
        assign[g] = 0

    rec(0)
    return best_val, best_assign


def constrained_opt_additive(weights, n: int):
    """Max-min over feasible partitions of the two-copy ground set.

    Copies are interleaved: position 2g is (g, copy 1), position 2g+1 is
    (g, copy 2); the two copies of a good must land in distinct blocks.
    Requires n >= 2.  Returns (value, assignment over 2m positions).
    """
    m = len(weights)
    sums = [0.0] * n
    assign = [0] * (2 * m)
    best_val = -INF
    best_assign = None

    def rec(d: int) -> None:
        nonlocal best_val, best_assign
        if d == 2 * m:
            val = min(sums)
            if val > best_val:
                best_val, best_assign = val, assign.copy()
            return
        w = weights[d >> 1]
        forbidden = assign[d - 1] if d & 1 else -1
        for j in range(n):
            if j == forbidden:
                continue
            prev = sums[j]
            sums[j] = prev + w
            assign[d] = j
            rec(d + 1)
            sums[j] = prev

    rec(0)
    return best_val, best_assign


def first_feasible_doubled(weight_rows, targets):
    """Lex-first feasible partition of the two-copy set meeting per-block
    value targets, block j scored by weight_rows[j].  None if impossible.

    Feasible means no block holds both copies of one good.  Positions are
    interleaved as in constrained_opt_additive.
    """
    n = len(weight_rows)
    m = len(weight_rows[0]) if n else 0
    # suffix[j][g] = total weight agent j could still gain from goods >= g
    suffix = [[0.0] * (m + 1) for _ in range(n)]
    for j in range(n):
        for g in range(m - 1, -1, -1):
            suffix[j][g] = suffix[j][g + 1] + weight_rows[j][g]
    sums = [0.0] * n
    assign = [0] * (2 * m)

    def rec(d: int):
        if d == 2 * m:
            # the suffix prune only proves targets stay reachable; the
            # leaf still has to check they were reached
            if all(sums[j] >= targets[j] - TOL for j in range(n)):
                return list(assign)
            return None
        g = d >> 1
        for j in range(n):
            if sums[j] + suffix[j][g] < targets[j] - TOL:
                return None  # block j can no longer reach its target
        forbidden = assign[d - 1] if d & 1 else -1
        for j in range(n):
            if j == forbidden:
                continue
            prev = sums[j]
            sums[j] = prev + weight_rows[j][g]
            assign[d] = j
            found = rec(d + 1)
            sums[j] = prev
            if found is not None:
                return found
        return None

    if n < 2:
        return None
    return rec(0)


def minmax_ratio_assign(cost_rows, mu):
    """Exact allocation minimizing max_j cost_j(A_j) / mu_j (lex-first).

    Blocks with mu_j = 0 contribute ratio 0 while their cost stays 0 and
    +inf otherwise.  Returns (ratio, assignment).
    """
    n = len(cost_rows)
    m = len(cost_rows[0]) if n else 0
    sums = [0.0] * n
    assign = [0] * m
    best_val = INF
    best_assign = list(assign)

    def ratio(j: int) -> float:
        if mu[j] <= TOL:
            return 0.0 if sums[j] <= TOL else INF
        return sums[j] / mu[j]

    def rec(g: int, cur: float) -> None:
        nonlocal best_val, best_assign
        if g == m:
            if cur < best_val:
                best_val, best_assign = cur, assign.copy()
            return
        for j in range(n):
            prev = sums[j]
            sums[j] = prev + cost_rows[j][g]
            nxt = ratio(j)
            if cur > nxt:
                nxt = cur
            if nxt < best_val:  # ratios only grow; equal can't improve
                assign[g] = j
                rec(g + 1, nxt)
            sums[j] = prev
        assign[g] = 0

    rec(0, 0.0)
    return best_val, best_assign


def min_linf_selection(block_items, m: int):
    """Minimum achievable linf over one-block-per-agent selections.

    block_items[i][j] lists the items of agent i's block j.  Returns
    (linf, selection) with the lex-first argmin.
    """
    n = len(block_items)
    counts = [0] * m
    select = [0] * n
    best_val = n + 1
    best_sel = list(select)

    def rec(i: int, cur_max: int) -> None:
        nonlocal best_val, best_sel
        if cur_max >= best_val:
            return
        if i == n:
            best_val, best_sel = cur_max, select.copy()
            return
        for j, items in enumerate(block_items[i]):
            new_max = cur_max
            for g in items:
                counts[g] += 1
                if counts[g] > new_max:
                    new_max = counts[g]
            select[i] = j
            rec(i + 1, new_max)
            for g in items:
                counts[g] -= 1
        select[i] = 0

    rec(0, 0)
    return best_val, best_sel


def min_l0_selection(block_items, m: int):
    """Minimum achievable l0 (uncovered items) over selections; lex-first."""
    n = len(block_items)
    counts = [0] * m
    select = [0] * n
    best_val = m + 1
    best_sel = list(select)
    # cover[i] = most items agents i..n-1 could still newly cover
    cover = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        biggest = max((len(items) for items in block_items[i]), default=0)
        cover[i] = cover[i + 1] + biggest

    def rec(i: int, zeros: int) -> None:
        nonlocal best_val, best_sel
        if zeros - cover[i] >= best_val:
            return
        if i == n:
            best_val, best_sel = zeros, select.copy()
            return
        for j, items in enumerate(block_items[i]):
            newly = 0
            for g in items:
                counts[g] += 1
                if counts[g] == 1:
                    newly += 1
            select[i] = j
            rec(i + 1, zeros - newly)
            for g in items:
                counts[g] -= 1
        select[i] = 0

    rec(0, m)
    return best_val, best_sel
