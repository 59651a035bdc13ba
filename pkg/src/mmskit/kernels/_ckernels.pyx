# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; mirrors _pykernels function-for-function.

Assignment vectors are enumerated in lexicographic order and the first
optimum is kept, so results (values, assignments, tie-breaks) are
bit-identical with the pure backend.
"""

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND_NAME = "compiled"

cdef double TOL = 1e-9


# ---------------------------------------------------------------------------
# table / additive assignment optimization
# ---------------------------------------------------------------------------

cdef void _rec_table(double* table, long* masks, long* assign,
                     long* best_assign, double* best_val,
                     int g, int m, int n, bint maximize) noexcept nogil:
    cdef int j, k
    cdef long bit
    cdef double val, v
    if g == m:
        val = table[masks[0]]
        if maximize:
            for j in range(1, n):
                v = table[masks[j]]
                if v < val:
                    val = v
            if val > best_val[0]:
                best_val[0] = val
                for k in range(m):
                    best_assign[k] = assign[k]
        else:
            for j in range(1, n):
                v = table[masks[j]]
                if v > val:
                    val = v
            if val < best_val[0]:
                best_val[0] = val
                for k in range(m):
                    best_assign[k] = assign[k]
        return
    bit = (<long> 1) << g
    for j in range(n):
        masks[j] |= bit
        assign[g] = j
        _rec_table(table, masks, assign, best_assign, best_val,
                   g + 1, m, n, maximize)
        masks[j] &= ~bit


def assign_opt_table(table, int n, int m, bint maximize_min):
    cdef double[::1] tbl = np.ascontiguousarray(table, dtype=np.float64)
    cdef long[::1] masks = np.zeros(n, dtype=np.int64)
    cdef long[::1] assign = np.zeros(max(m, 1), dtype=np.int64)
    cdef long[::1] best = np.zeros(max(m, 1), dtype=np.int64)
    cdef double best_val = -INFINITY if maximize_min else INFINITY
    _rec_table(&tbl[0], &masks[0], &assign[0], &best[0], &best_val,
               0, m, n, maximize_min)
    return best_val, list(np.asarray(best[:m]))


cdef void _rec_additive(double* w, double* sums, long* assign,
                        long* best_assign, double* best_val,
                        int g, int m, int n, bint maximize) noexcept nogil:
    cdef int j, k
    cdef double val, v, prev
    if g == m:
        val = sums[0]
        if maximize:
            for j in range(1, n):
                if sums[j] < val:
                    val = sums[j]
            if val > best_val[0]:
                best_val[0] = val
                for k in range(m):
                    best_assign[k] = assign[k]
        else:
            for j in range(1, n):
                if sums[j] > val:
                    val = sums[j]
            if val < best_val[0]:
                best_val[0] = val
                for k in range(m):
                    best_assign[k] = assign[k]
        return
    for j in range(n):
        # save/restore instead of -=: subtracting w back can drift by an
        # ulp and break exact ties between relabeled partitions
        prev = sums[j]
        sums[j] = prev + w[g]
        assign[g] = j
        _rec_additive(w, sums, assign, best_assign, best_val,
                      g + 1, m, n, maximize)
        sums[j] = prev


def assign_opt_additive(weights, int n, bint maximize_min):
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef int m = w.shape[0]
    cdef double[::1] sums = np.zeros(n, dtype=np.float64)
    cdef long[::1] assign = np.zeros(max(m, 1), dtype=np.int64)
    cdef long[::1] best = np.zeros(max(m, 1), dtype=np.int64)
    cdef double best_val = -INFINITY if maximize_min else INFINITY
    _rec_additive(&w[0], &sums[0], &assign[0], &best[0], &best_val,
                  0, m, n, maximize_min)
    return best_val, list(np.asarray(best[:m]))


# ---------------------------------------------------------------------------
# two-copy (doubled) instance kernels
# ---------------------------------------------------------------------------

cdef void _rec_constrained(double* w, double* sums, long* assign,
                           long* best_assign, double* best_val,
                           int d, int m2, int n) noexcept nogil:
    cdef int j, k
    cdef int forbidden
    cdef double val, wg, prev
    if d == m2:
        val = sums[0]
        for j in range(1, n):
            if sums[j] < val:
                val = sums[j]
        if val > best_val[0]:
            best_val[0] = val
            for k in range(m2):
                best_assign[k] = assign[k]
        return
    wg = w[d >> 1]
    forbidden = assign[d - 1] if d & 1 else -1
    for j in range(n):
        if j == forbidden:
            continue
        prev = sums[j]
        sums[j] = prev + wg
        assign[d] = j
        _rec_constrained(w, sums, assign, best_assign, best_val,
                         d + 1, m2, n)
        sums[j] = prev


def constrained_opt_additive(weights, int n):
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef int m = w.shape[0]
    cdef double[::1] sums = np.zeros(n, dtype=np.float64)
    cdef long[::1] assign = np.zeros(2 * m, dtype=np.int64)
    cdef long[::1] best = np.zeros(2 * m, dtype=np.int64)
    cdef double best_val = -INFINITY
    _rec_constrained(&w[0], &sums[0], &assign[0], &best[0], &best_val,
                     0, 2 * m, n)
    if best_val == -INFINITY:
        return best_val, None
    return best_val, list(np.asarray(best))


cdef bint _rec_first_feasible(double* w, double* suffix, double* targets,
                              double* sums, long* assign,
                              int d, int m2, int n, int m) noexcept nogil:
    cdef int j, g
    cdef int forbidden
    cdef double prev
    if d == m2:
        # the suffix prune only proves targets stay reachable; the leaf
        # still has to check they were reached
        for j in range(n):
            if sums[j] < targets[j] - TOL:
                return False
        return True
    g = d >> 1
    for j in range(n):
        if sums[j] + suffix[j * (m + 1) + g] < targets[j] - TOL:
            return False
    forbidden = assign[d - 1] if d & 1 else -1
    for j in range(n):
        if j == forbidden:
            continue
        prev = sums[j]
        sums[j] = prev + w[j * m + g]
        assign[d] = j
        if _rec_first_feasible(w, suffix, targets, sums, assign,
                               d + 1, m2, n, m):
            return True
        sums[j] = prev
    return False


def first_feasible_doubled(weight_rows, targets):
    cdef int n = len(weight_rows)
    if n < 2:
        return None
    rows = np.ascontiguousarray(weight_rows, dtype=np.float64)
    cdef double[:, ::1] w = rows
    cdef int m = w.shape[1]
    suf = np.zeros((n, m + 1), dtype=np.float64)
    suf[:, :m] = rows[:, ::-1].cumsum(axis=1)[:, ::-1]
    cdef double[:, ::1] suffix = suf
    cdef double[::1] tgt = np.ascontiguousarray(targets, dtype=np.float64)
    cdef double[::1] sums = np.zeros(n, dtype=np.float64)
    cdef long[::1] assign = np.zeros(2 * m, dtype=np.int64)
    if _rec_first_feasible(&w[0, 0], &suffix[0, 0], &tgt[0], &sums[0],
                           &assign[0], 0, 2 * m, n, m):
        return list(np.asarray(assign))
    return None


# ---------------------------------------------------------------------------
# min-max cost ratio allocation
# ---------------------------------------------------------------------------

cdef void _rec_ratio(double* cost, double* mu, double* sums, long* assign,
                     long* best_assign, double* best_val,
                     int g, int m, int n, double cur) noexcept nogil:
    cdef int j, k
    cdef double nxt, r, prev
    if g == m:
        if cur < best_val[0]:
            best_val[0] = cur
            for k in range(m):
                best_assign[k] = assign[k]
        return
    for j in range(n):
        prev = sums[j]
        sums[j] = prev + cost[j * m + g]
        if mu[j] <= TOL:
            r = 0.0 if sums[j] <= TOL else INFINITY
        else:
            r = sums[j] / mu[j]
        nxt = cur if cur > r else r
        if nxt < best_val[0]:
            assign[g] = j
            _rec_ratio(cost, mu, sums, assign, best_assign, best_val,
                       g + 1, m, n, nxt)
        sums[j] = prev


def minmax_ratio_assign(cost_rows, mu):
    rows = np.ascontiguousarray(cost_rows, dtype=np.float64)
    cdef double[:, ::1] cost = rows
    cdef int n = cost.shape[0]
    cdef int m = cost.shape[1]
    cdef double[::1] mu_v = np.ascontiguousarray(mu, dtype=np.float64)
    cdef double[::1] sums = np.zeros(n, dtype=np.float64)
    cdef long[::1] assign = np.zeros(max(m, 1), dtype=np.int64)
    cdef long[::1] best = np.zeros(max(m, 1), dtype=np.int64)
    cdef double best_val = INFINITY
    _rec_ratio(&cost[0, 0], &mu_v[0], &sums[0], &assign[0], &best[0],
               &best_val, 0, m, n, 0.0)
    return best_val, list(np.asarray(best[:m]))


# ---------------------------------------------------------------------------
# selection-family scans
# ---------------------------------------------------------------------------

cdef void _rec_linf(long* item_off, long* items, long* nblocks,
                    long* block_start, long* counts, long* select,
                    long* best_sel, long* best_val,
                    int i, int n, int cur_max) noexcept nogil:
    cdef int j, k
    cdef long idx, t, g
    cdef int new_max
    if cur_max >= best_val[0]:
        return
    if i == n:
        best_val[0] = cur_max
        for k in range(n):
            best_sel[k] = select[k]
        return
    for j in range(nblocks[i]):
        idx = block_start[i] + j
        new_max = cur_max
        for t in range(item_off[idx], item_off[idx + 1]):
            g = items[t]
            counts[g] += 1
            if counts[g] > new_max:
                new_max = <int> counts[g]
        select[i] = j
        _rec_linf(item_off, items, nblocks, block_start, counts, select,
                  best_sel, best_val, i + 1, n, new_max)
        for t in range(item_off[idx], item_off[idx + 1]):
            counts[items[t]] -= 1


cdef void _rec_l0(long* item_off, long* items, long* nblocks,
                  long* block_start, long* counts, long* cover,
                  long* select, long* best_sel, long* best_val,
                  int i, int n, long zeros) noexcept nogil:
    cdef int j, k
    cdef long idx, t, g, newly
    if zeros - cover[i] >= best_val[0]:
        return
    if i == n:
        best_val[0] = zeros
        for k in range(n):
            best_sel[k] = select[k]
        return
    for j in range(nblocks[i]):
        idx = block_start[i] + j
        newly = 0
        for t in range(item_off[idx], item_off[idx + 1]):
            g = items[t]
            counts[g] += 1
            if counts[g] == 1:
                newly += 1
        select[i] = j
        _rec_l0(item_off, items, nblocks, block_start, counts, cover,
                select, best_sel, best_val, i + 1, n, zeros - newly)
        for t in range(item_off[idx], item_off[idx + 1]):
            counts[items[t]] -= 1


def _flatten(block_items):
    nblocks = np.array([len(bs) for bs in block_items], dtype=np.int64)
    block_start = np.zeros(len(block_items) + 1, dtype=np.int64)
    np.cumsum(nblocks, out=block_start[1:])
    offs = [0]
    flat = []
    for bs in block_items:
        for items in bs:
            flat.extend(items)
            offs.append(len(flat))
    item_off = np.array(offs, dtype=np.int64)
    items = np.array(flat or [0], dtype=np.int64)
    return nblocks, block_start, item_off, items


def min_linf_selection(block_items, int m):
    cdef int n = len(block_items)
    nblocks, block_start, item_off, items = _flatten(block_items)
    cdef long[::1] nb = nblocks
    cdef long[::1] bs = block_start
    cdef long[::1] io = item_off
    cdef long[::1] it = items
    cdef long[::1] counts = np.zeros(max(m, 1), dtype=np.int64)
    cdef long[::1] select = np.zeros(max(n, 1), dtype=np.int64)
    cdef long[::1] best_sel = np.zeros(max(n, 1), dtype=np.int64)
    cdef long best_val = n + 1
    _rec_linf(&io[0], &it[0], &nb[0], &bs[0], &counts[0], &select[0],
              &best_sel[0], &best_val, 0, n, 0)
    return int(best_val), list(np.asarray(best_sel[:n]))


def min_l0_selection(block_items, int m):
    cdef int n = len(block_items)
    nblocks, block_start, item_off, items = _flatten(block_items)
    cover_arr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        biggest = max((len(x) for x in block_items[i]), default=0)
        cover_arr[i] = cover_arr[i + 1] + biggest
    cdef long[::1] nb = nblocks
    cdef long[::1] bs = block_start
    cdef long[::1] io = item_off
    cdef long[::1] it = items
    cdef long[::1] cover = cover_arr
    cdef long[::1] counts = np.zeros(max(m, 1), dtype=np.int64)
    cdef long[::1] select = np.zeros(max(n, 1), dtype=np.int64)
    cdef long[::1] best_sel = np.zeros(max(n, 1), dtype=np.int64)
    cdef long best_val = m + 1
    _rec_l0(&io[0], &it[0], &nb[0], &bs[0], &counts[0], &cover[0],
            &select[0], &best_sel[0], &best_val, 0, n, m)
    return int(best_val), list(np.asarray(best_sel[:n]))
