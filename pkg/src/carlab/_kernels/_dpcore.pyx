# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled banded max-plus recursion (hot kernel of the curve seminorms)."""

import numpy as np


def dp_forward(costs, pair_width=None) -> float:
    """Maximum path sum through the banded cost tensor; see _dpref.dp_forward."""
    cview = np.ascontiguousarray(costs, dtype=np.float64)
    n_x = cview.shape[1]
    n_off = cview.shape[2]
    w = (n_off - 1) // 2
    if pair_width is None or pair_width >= min(2 * w, n_x - 1):
        return _first_order(cview)
    return _second_order(cview, int(pair_width))


def _first_order(double[:, :, ::1] costs) -> float:
    cdef Py_ssize_t n_t = costs.shape[0]
    cdef Py_ssize_t n_x = costs.shape[1]
    cdef Py_ssize_t n_off = costs.shape[2]
    cdef Py_ssize_t w = (n_off - 1) // 2
    cdef double neg_inf = -np.inf

    buf_v = np.zeros(n_x, dtype=np.float64)
    buf_n = np.empty(n_x, dtype=np.float64)
    cdef double[::1] v = buf_v
    cdef double[::1] nv = buf_n
    cdef double[::1] tmp
    cdef Py_ssize_t k, c, o, c2
    cdef double base, cand, best

    for k in range(n_t):
        for c2 in range(n_x):
            nv[c2] = neg_inf
        for c in range(n_x):
            base = v[c]
            if base == neg_inf:
                continue
            for o in range(n_off):
                c2 = c + o - w
                if c2 < 0 or c2 >= n_x:
                    continue
                cand = base + costs[k, c, o]
                if cand > nv[c2]:
                    nv[c2] = cand
        tmp = v
        v = nv
        nv = tmp

    best = v[0]
    for c in range(1, n_x):
        if v[c] > best:
            best = v[c]
    return best


def _second_order(double[:, :, ::1] costs, Py_ssize_t pair_width) -> float:
    cdef Py_ssize_t n_t = costs.shape[0]
    cdef Py_ssize_t n_x = costs.shape[1]
    cdef Py_ssize_t n_off = costs.shape[2]
    cdef Py_ssize_t w = (n_off - 1) // 2
    cdef double neg_inf = -np.inf

    buf_v = np.full((n_x, n_off), neg_inf, dtype=np.float64)
    buf_n = np.empty((n_x, n_off), dtype=np.float64)
    cdef double[:, ::1] v = buf_v
    cdef double[:, ::1] nv = buf_n
    cdef double[:, ::1] tmp
    cdef Py_ssize_t k, c, o1, o2, c2, d1, d2
    cdef double base, cand, best

    # first step: any in-range offset is allowed
    for c in range(n_x):
        for o2 in range(n_off):
            c2 = c + o2 - w
            if c2 < 0 or c2 >= n_x:
                continue
            cand = costs[0, c, o2]
            if cand > v[c2, o2]:
                v[c2, o2] = cand

    for k in range(1, n_t):
        for c2 in range(n_x):
            for o2 in range(n_off):
                nv[c2, o2] = neg_inf
        for c in range(n_x):
            for o1 in range(n_off):
                base = v[c, o1]
                if base == neg_inf:
                    continue
                d1 = o1 - w
                for o2 in range(n_off):
                    d2 = o2 - w
                    if d1 + d2 > pair_width or -(d1 + d2) > pair_width:
                        continue
                    c2 = c + d2
                    if c2 < 0 or c2 >= n_x:
                        continue
                    cand = base + costs[k, c, o2]
                    if cand > nv[c2, o2]:
                        nv[c2, o2] = cand
        tmp = v
        v = nv
        nv = tmp

    best = neg_inf
    for c in range(n_x):
        for o2 in range(n_off):
            if v[c, o2] > best:
                best = v[c, o2]
    return best
