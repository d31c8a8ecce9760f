"""Exact Lebesgue measure of a union of axis-aligned boxes."""
from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _seg_update(a, b, delta, nseg, ys, cnt, cov, stack):
    # explicit stack; numba's cached recursion segfaults on large inputs
    # stack rows: node, lo, hi, phase (0 = descend, 1 = recompute cover)
    top = 0
    stack[0, 0], stack[0, 1], stack[0, 2], stack[0, 3] = 1, 0, nseg, 0
    while top >= 0:
        node, lo, hi, phase = stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3]
        if phase == 0:
            if b <= lo or hi <= a:
                top -= 1
                continue
            if a <= lo and hi <= b:
                cnt[node] += delta
            else:
                stack[top, 3] = 1
                mid = (lo + hi) // 2
                stack[top + 1, 0], stack[top + 1, 1], stack[top + 1, 2], stack[top + 1, 3] = 2 * node, lo, mid, 0
                stack[top + 2, 0], stack[top + 2, 1], stack[top + 2, 2], stack[top + 2, 3] = 2 * node + 1, mid, hi, 0
                top += 2
                continue
        if cnt[node] > 0:
            cov[node] = ys[hi] - ys[lo]
        elif hi - lo == 1:
            cov[node] = 0.0
        else:
            cov[node] = cov[2 * node] + cov[2 * node + 1]
        top -= 1


@numba.njit(cache=True)
def _area_2d(x0, x1, y0, y1):
    m = x0.shape[0]
    if m == 0:
        return 0.0
    ys = np.unique(np.concatenate((y0, y1)))
    ia = np.searchsorted(ys, y0)
    ib = np.searchsorted(ys, y1)
    ex = np.concatenate((x0, x1))
    kind = np.concatenate((np.ones(m, np.int64), -np.ones(m, np.int64)))
    who = np.concatenate((np.arange(m), np.arange(m)))
    order = np.argsort(ex, kind="mergesort")
    nseg = ys.shape[0] - 1
    if nseg <= 0:
        return 0.0
    size = 4 * nseg + 4
    cnt = np.zeros(size, np.int64)
    cov = np.zeros(size, np.float64)
    depth = 2
    while (1 << depth) < nseg:
        depth += 1
    stack = np.zeros((2 * depth + 8, 4), np.int64)
    area = 0.0
    prev = ex[order[0]]
    for e in range(2 * m):
        i = order[e]
        x = ex[i]
        area += cov[1] * (x - prev)
        prev = x
        b = who[i]
        _seg_update(ia[b], ib[b], kind[i], nseg, ys, cnt, cov, stack)
    return area


def _length_1d(lo: np.ndarray, hi: np.ndarray) -> float:
    if len(lo) == 0:
        return 0.0
    order = np.argsort(lo, kind="mergesort")
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    starts = np.concatenate(([True], lo[1:] > reach[:-1]))
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:], len(lo)) - 1
    return float(np.sum(reach[ends] - lo[idx]))


def union_measure(lo: np.ndarray, hi: np.ndarray) -> float:
    """Measure of the union of boxes prod_j (lo[i, j], hi[i, j]).

    Two dimensions use a sweep line with a segment tree. Higher dimensions sweep
    the first axis and recurse on the cross-section of the active boxes.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if lo.ndim != 2 or lo.shape != hi.shape:
        raise ValueError("lo and hi must have the same (boxes, dims) shape")
    keep = np.all(hi > lo, axis=1)
    lo, hi = lo[keep], hi[keep]
    d = lo.shape[1]
    if d == 1:
        return _length_1d(lo[:, 0], hi[:, 0])
    if d == 2:
        return float(_area_2d(lo[:, 0].copy(), hi[:, 0].copy(), lo[:, 1].copy(), hi[:, 1].copy()))
    xs = np.unique(np.concatenate((lo[:, 0], hi[:, 0])))
    total = 0.0
    for a, b in zip(xs[:-1], xs[1:]):
        act = (lo[:, 0] <= a) & (hi[:, 0] >= b)
        if act.any():
            total += (b - a) * union_measure(lo[act, 1:], hi[act, 1:])
    return total
