"""Pure-numpy fallback for the banded max-plus recursion."""

import numpy as np


def dp_forward(costs: np.ndarray, pair_width: int | None = None) -> float:
    """Maximum path sum through the banded cost tensor.

    costs[k, c, o] is the cost of stepping from cell c at time k to cell
    c + (o - width), with width = (n_off - 1) // 2; -inf marks transitions
    that leave the grid.  When ``pair_width`` is binding (below twice the
    step width) two-step moves are capped at pair_width cells as well, which
    stops the one-cell step slack from accumulating.
    """
    costs = np.ascontiguousarray(costs, dtype=float)
    n_t, n_x, n_off = costs.shape
    w = (n_off - 1) // 2
    if pair_width is None or pair_width >= min(2 * w, n_x - 1):
        return _first_order(costs, n_t, n_x, n_off, w)
    return _second_order(costs, n_t, n_x, n_off, w, int(pair_width))


def _shift_max(acc, vals, d):
    # acc[c + d] = max(acc[c + d], vals[c]) over valid cells
    n = len(acc)
    lo = max(0, -d)
    hi = min(n, n - d)
    if lo < hi:
        np.maximum(acc[lo + d:hi + d], vals[lo:hi], out=acc[lo + d:hi + d])


def _first_order(costs, n_t, n_x, n_off, w):
    v = np.zeros(n_x)
    for k in range(n_t):
        nv = np.full(n_x, -np.inf)
        for o in range(n_off):
            _shift_max(nv, v + costs[k, :, o], o - w)
        v = nv
    return float(v.max())


def _second_order(costs, n_t, n_x, n_off, w, pair_width):
    # state: (cell, offset used to arrive there)
    v = np.full((n_x, n_off), -np.inf)
    for o in range(n_off):
        _shift_max(v[:, o], costs[0, :, o], o - w)
    for k in range(1, n_t):
        nv = np.full((n_x, n_off), -np.inf)
        for o2 in range(n_off):
            step = costs[k, :, o2]
            for o1 in range(n_off):
                if abs((o1 - w) + (o2 - w)) > pair_width:
                    continue
                _shift_max(nv[:, o2], v[:, o1] + step, o2 - w)
        v = nv
    return float(v.max())
