"""Dense linear assignment.

Jonker-Volgenant style solver: column reduction for the initial partial
assignment, then one Dijkstra-like shortest augmenting path per free row
over reduced costs. The compiled kernel is used when numba is available;
``_lap_numpy`` is the vectorized fallback and follows the same steps.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import _accel
from ._accel import njit
from .core import PermutationMap, as_matrix, check_same_shape, gram_cross
from .errors import DimensionMismatch, NonFinite, TooLarge

BRUTE_FORCE_MAX = 9
# above this many rows the similarity matrix of match_step is held in float32
FLOAT32_ABOVE = 20000


class CostMatrix:
    """Square matrix of finite costs."""

    __slots__ = ("values",)

    def __init__(self, values):
        if isinstance(values, CostMatrix):
            values = values.values
        v = np.asarray(values)
        if v.dtype not in (np.float32, np.float64):
            v = v.astype(np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"cost matrix must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFinite("cost matrix has NaN or infinite entries")
        self.values = np.ascontiguousarray(v)

    @property
    def n(self):
        return self.values.shape[0]

    def total(self, p):
        f = p.forward if isinstance(p, PermutationMap) else np.asarray(p)
        return float(self.values[np.arange(self.n), f].astype(np.float64).sum())


@njit(cache=True)
def _column_reduction(cost, x, y, v):
    n = cost.shape[0]
    for j in range(n):
        imin = 0
        mn = cost[0, j]
        for i in range(1, n):
            if cost[i, j] < mn:
                mn = cost[i, j]
                imin = i
        v[j] = mn
        if x[imin] < 0:
            x[imin] = j
            y[j] = imin


@njit(cache=True)
def _lap_kernel(cost, x, y, v):
    n = cost.shape[0]
    d = np.empty(n, dtype=np.float64)
    pred = np.empty(n, dtype=np.int64)
    collist = np.empty(n, dtype=np.int64)
    for f in range(n):
        if x[f] >= 0:
            continue
        for j in range(n):
            d[j] = cost[f, j] - v[j]
            pred[j] = f
            collist[j] = j
        low = 0
        up = 0
        last = 0
        mn = 0.0
        endofpath = -1
        while endofpath < 0:
            if up == low:
                # next batch of columns at minimal distance
                last = low
                mn = d[collist[up]]
                up += 1
                for k in range(up, n):
                    j = collist[k]
                    h = d[j]
                    if h <= mn:
                        if h < mn:
                            up = low
                            mn = h
                        collist[k] = collist[up]
                        collist[up] = j
                        up += 1
                bestfree = -1
                for k in range(low, up):
                    j = collist[k]
                    if y[j] < 0 and (bestfree < 0 or j < bestfree):
                        bestfree = j
                if bestfree >= 0:
                    endofpath = bestfree
                    break
            j1 = collist[low]
            low += 1
            i = y[j1]
            u1 = cost[i, j1] - v[j1] - mn
            k = up
            while k < n:
                j = collist[k]
                h = cost[i, j] - v[j] - u1
                if h < d[j]:
                    d[j] = h
                    pred[j] = i
                    if h == mn:
                        if y[j] < 0:
                            endofpath = j
                            break
                        collist[k] = collist[up]
                        collist[up] = j
                        up += 1
                k += 1
        for k in range(last):
            j = collist[k]
            v[j] += d[j] - mn
        while True:
            i = pred[endofpath]
            y[endofpath] = i
            j1 = endofpath
            endofpath = x[i]
            x[i] = j1
            if i == f:
                break


def _lap_numpy(cost, x, y, v):
    n = cost.shape[0]
    for j in range(n):
        imin = int(np.argmin(cost[:, j]))
        v[j] = cost[imin, j]
        if x[imin] < 0:
            x[imin] = j
            y[j] = imin
    for f in np.flatnonzero(x < 0):
        d = cost[f].astype(np.float64) - v
        pred = np.full(n, f, dtype=np.int64)
        done = np.zeros(n, dtype=bool)
        while True:
            j = int(np.argmin(np.where(done, np.inf, d)))
            mn = d[j]
            done[j] = True
            if y[j] < 0:
                break
            i = y[j]
            h = mn + (cost[i] - v) - (cost[i, j] - v[j])
            better = ~done & (h < d)
            d[better] = h[better]
            pred[better] = i
        scanned = done.copy()
        scanned[j] = False
        v[scanned] += d[scanned] - mn
        endofpath = j
        while True:
            i = pred[endofpath]
            y[endofpath] = i
            endofpath, x[i] = x[i], endofpath
            if i == f:
                break


def _solve(values, use_numba=None):
    n = values.shape[0]
    x = np.full(n, -1, dtype=np.int64)
    y = np.full(n, -1, dtype=np.int64)
    v = np.zeros(n, dtype=np.float64)
    if n == 0:
        return x
    if use_numba is None:
        use_numba = _accel.HAS_NUMBA
    if use_numba and _accel.HAS_NUMBA:
        _column_reduction(values, x, y, v)
        _lap_kernel(values, x, y, v)
    else:
        _lap_numpy(values, x, y, v)
    return x


def solve_assignment(cost, use_numba=None):
    """Minimum-cost bijection for a dense square cost matrix.

    Returns ``(p, total)`` with ``p[i]`` the column given to row ``i``.
    ``use_numba`` overrides the module-wide choice (None keeps it).
    """
    cm = cost if isinstance(cost, CostMatrix) else CostMatrix(cost)
    p = PermutationMap(_solve(cm.values, use_numba))
    return p, cm.total(p)


def brute_force_assignment(cost):
    """Exhaustive minimum over all ``n!`` permutations, for ``n <= 9``."""
    cm = cost if isinstance(cost, CostMatrix) else CostMatrix(cost)
    n = cm.n
    if n > BRUTE_FORCE_MAX:
        raise TooLarge(f"brute force limited to n <= {BRUTE_FORCE_MAX}, got {n}")
    vals = cm.values.astype(np.float64)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    totals = vals[np.arange(n), perms].sum(axis=1)
    # argmin keeps the first minimum in lexicographic order
    p = PermutationMap(perms[np.argmin(totals)])
    return p, cm.total(p)


def _similarity_dtype(n, dtype):
    if dtype is not None:
        return dtype
    return np.float32 if n > FLOAT32_ABOVE else np.float64


def match_step(x, y, dtype=None, use_numba=None) -> PermutationMap:
    """Permutation maximizing ``sum_i x[i] . y[p[i]]`` (Hungarian step)."""
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    g = gram_cross(xm, ym, dtype=_similarity_dtype(xm.shape[0], dtype))
    np.negative(g, out=g)
    p, _ = solve_assignment(CostMatrix(g), use_numba=use_numba)
    return p


def constrained_match_step(x, y, pinned_src, pinned_tgt, dtype=None, use_numba=None) -> PermutationMap:
    """``match_step`` with rows ``pinned_src[k]`` forced onto ``pinned_tgt[k]``.

    The pinned rows and columns are removed and the remaining square block
    is solved exactly.
    """
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    n = xm.shape[0]
    pinned_src = np.asarray(pinned_src, dtype=np.int64)
    pinned_tgt = np.asarray(pinned_tgt, dtype=np.int64)
    forward = np.full(n, -1, dtype=np.int64)
    forward[pinned_src] = pinned_tgt
    free_rows = np.flatnonzero(forward < 0)
    taken = np.zeros(n, dtype=bool)
    taken[pinned_tgt] = True
    free_cols = np.flatnonzero(~taken)
    if free_rows.size:
        sub = match_step(xm[free_rows], ym[free_cols], dtype=dtype, use_numba=use_numba)
        forward[free_rows] = free_cols[sub.forward]
    return PermutationMap(forward)
