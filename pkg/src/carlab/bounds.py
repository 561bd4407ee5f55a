"""Optimal m-bounds and l-bounds on balls, family-level integrability tests,
and construction of suitable sets of moduli of continuity.

Suprema over balls are taken on nested dyadic grids and reported as lower
bounds of the true sup; descriptors whose structure allows it (constants,
linear maps, shifted profiles) get exact per-piece maximization instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import field as fd
from .field import FieldDescriptor, UnsupportedOperationError


class WindowRangeError(ValueError):
    """Requested sub-interval is not covered by the stored grid."""


# ---------------------------------------------------------------------------
# sampled bounds


@dataclass(frozen=True)
class SampledBound:
    """A nonnegative function of t on a uniform grid over ``window``."""

    window: tuple[float, float]
    values: np.ndarray
    p: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValueError("bound values must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "window",
                           (float(self.window[0]), float(self.window[1])))
        if not self.window[0] < self.window[1]:
            raise ValueError("window must have positive length")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.window[0], self.window[1], len(self.values))

    @property
    def step(self) -> float:
        return (self.window[1] - self.window[0]) / (len(self.values) - 1)

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.grid, self.values))

    def to_csv(self, path, j=None, interval=None):
        with open(path, "w", newline="") as fh:
            iv = interval if interval is not None else self.window
            fh.write(f"# I=[{iv[0]!r},{iv[1]!r}] j={j!r} p={self.p!r}\n")
            writer = csv.writer(fh)
            writer.writerow(["t", "value"])
            for t, v in zip(self.grid, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


def lp_norm(bound: SampledBound, sub: tuple[float, float] | None = None) -> float:
    """(integral of bound^p over sub)^(1/p), composite trapezoid on the grid.

    Sub-interval ends falling between samples use the linear interpolant.
    """
    a, b = sub if sub is not None else bound.window
    lo, hi = bound.window
    tol = 1e-9 * (1.0 + abs(lo) + abs(hi))
    if a < lo - tol or b > hi + tol or a > b:
        raise WindowRangeError(f"[{a}, {b}] outside stored window [{lo}, {hi}]")
    a, b = max(a, lo), min(b, hi)
    grid = bound.grid
    vp = np.asarray(bound.values, dtype=float) ** bound.p
    inner = (grid > a) & (grid < b)
    ts = np.concatenate(([a], grid[inner], [b]))
    vs = np.concatenate(([np.interp(a, grid, vp)], vp[inner],
                         [np.interp(b, grid, vp)]))
    return float(np.trapezoid(vs, ts) ** (1.0 / bound.p))


def is_lp_bounded(family, r: float) -> float:
    """Finite-family supremum of the integrals of m^p over [-r, r].

    The empty-family supremum is 0 by convention.
    """
    if not family:
        return 0.0
    ps = {b.p for b in family}
    if len(ps) != 1:
        raise ValueError("family members must share the exponent p")
    sup = 0.0
    for b in family:
        sup = max(sup, lp_norm(b, (-r, r)) ** b.p)
    return sup


# ---------------------------------------------------------------------------
# optimal bounds of a descriptor


def _ball_grid(j: float, dim: int, density: int) -> np.ndarray:
    axis = np.linspace(-j, j, density + 1)
    if dim == 1:
        return axis[:, None]
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _exact_m_values(node: fd.Node, ts: np.ndarray, j: float) -> np.ndarray | None:
    if isinstance(node, fd.Constant):
        return np.full(len(ts), fd.value_norm(np.asarray(node.data, dtype=float)))
    if isinstance(node, fd.LinearInX):
        return np.full(len(ts), j * fd.operator_norm(np.asarray(node.matrix)))
    if isinstance(node, fd.TimeFn):
        return np.abs(np.asarray(node.profile(ts), dtype=float))
    if isinstance(node, fd.ShiftCompose):
        half = abs(node.a) * j
        return np.array([node.profile.max_abs_on(t - half, t + half) for t in ts])
    if isinstance(node, fd.ScalarScale):
        inner = _exact_m_values(node.inner, ts, j)
        return None if inner is None else abs(node.factor) * inner
    if isinstance(node, fd.Translate):
        inner = _exact_m_values(node.inner, ts + node.tau, j)
        return inner
    if isinstance(node, fd.Callback) and node.m_bound_fn is not None:
        return np.asarray(node.m_bound_fn(ts, j), dtype=float)
    return None


def _exact_l_values(node: fd.Node, ts: np.ndarray, j: float) -> np.ndarray | None:
    if isinstance(node, (fd.Constant, fd.TimeFn)):
        return np.zeros(len(ts))
    if isinstance(node, fd.LinearInX):
        return np.full(len(ts), fd.operator_norm(np.asarray(node.matrix)))
    if isinstance(node, fd.ShiftCompose):
        half = abs(node.a) * j
        slopes = []
        for t in ts:
            s = node.profile.max_slope_on(t - half, t + half)
            if s is None:
                return None
            slopes.append(s)
        return abs(node.a) * np.asarray(slopes)
    if isinstance(node, fd.ScalarScale):
        inner = _exact_l_values(node.inner, ts, j)
        return None if inner is None else abs(node.factor) * inner
    if isinstance(node, fd.Translate):
        return _exact_l_values(node.inner, ts + node.tau, j)
    if isinstance(node, fd.Callback) and node.l_bound_fn is not None:
        return np.asarray(node.l_bound_fn(ts, j), dtype=float)
    return None


def optimal_m_bound(f: FieldDescriptor, j: float, window,
                    t_samples: int = 513, x_density: int = 64) -> SampledBound:
    """Pointwise-in-t supremum of |f(t, .)| over the ball of radius j.

    Exact per-piece maximization where the tree structure allows it, else a
    dyadic-grid scan (a lower bound converging from below under refinement).
    """
    if j <= 0:
        raise ValueError("radius must be positive")
    a, b = float(window[0]), float(window[1])
    ts = np.linspace(a, b, t_samples)
    vals = _exact_m_values(f.node, ts, j)
    if vals is None:
        xs = _ball_grid(j, f.dim_in, x_density)
        vals = np.empty(t_samples)
        tcol = np.repeat(ts, len(xs))
        xcol = np.tile(xs, (t_samples, 1))
        norms = fd.batch_norms(f.node.eval_many(tcol, xcol))
        vals = norms.reshape(t_samples, len(xs)).max(axis=1)
    return SampledBound((a, b), np.abs(vals), f.p)


def optimal_l_bound(f: FieldDescriptor, j: float, window,
                    t_samples: int = 513, pair_density: int = 24) -> SampledBound:
    """Supremum of the Lipschitz quotient of f(t, .) over the ball of radius j.

    Requires the LC class claim; exact for linear maps and shift-composed
    continuous profiles, sampled difference quotients otherwise.
    """
    if f.class_claim != fd.LC:
        raise UnsupportedOperationError("l-bound needs an LC class claim")
    if j <= 0:
        raise ValueError("radius must be positive")
    a, b = float(window[0]), float(window[1])
    ts = np.linspace(a, b, t_samples)
    vals = _exact_l_values(f.node, ts, j)
    if vals is None:
        xs = _ball_grid(j, f.dim_in, pair_density)
        pairs = [(u, v) for i, u in enumerate(xs) for v in xs[i + 1:]]
        # neighbor pairs on a finer axis catch the local (derivative) quotients
        fine = _ball_grid(j, f.dim_in, 4 * pair_density)
        pairs += list(zip(fine[:-1], fine[1:]))
        us = np.array([p[0] for p in pairs])
        vs = np.array([p[1] for p in pairs])
        gaps = np.linalg.norm(us - vs, axis=1)
        keep = gaps > 0
        us, vs, gaps = us[keep], vs[keep], gaps[keep]
        vals = np.empty(t_samples)
        for k, t in enumerate(ts):  # pair batches kept per-t to bound memory
            tcol = np.full(len(us), t)
            du = f.node.eval_many(tcol, us) - f.node.eval_many(tcol, vs)
            vals[k] = float(np.max(fd.batch_norms(du) / gaps))
    return SampledBound((a, b), np.abs(vals), f.p)


# ---------------------------------------------------------------------------
# equicontinuity of a family of bounds


@dataclass(frozen=True)
class EquicontinuityProfile:
    """Largest certified delta per epsilon; None marks FAIL at that epsilon.

    FAIL means sliding windows at the finest resolved width already reach the
    epsilon mass, so no positive grid delta can be certified.
    """

    radius: float
    entries: tuple[tuple[float, float | None], ...]

    def delta(self, eps: float) -> float | None:
        for e, d in self.entries:
            if e == eps:
                return d
        raise KeyError(eps)

    def failed(self, eps: float) -> bool:
        return self.delta(eps) is None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(f"# r={self.radius!r}\n")
            writer = csv.writer(fh)
            writer.writerow(["epsilon", "delta", "verdict"])
            for e, d in self.entries:
                writer.writerow([repr(e), "" if d is None else repr(d),
                                 "FAIL" if d is None else "PASS"])


def _restrict(bound: SampledBound, r: float):
    lo, hi = bound.window
    tol = 1e-9 * (1.0 + r)
    if lo > -r + tol or hi < r - tol:
        raise WindowRangeError(f"bound window [{lo}, {hi}] does not cover "
                               f"[-{r}, {r}]")
    grid = bound.grid
    mask = (grid >= -r - tol) & (grid <= r + tol)
    return grid[mask], np.asarray(bound.values)[mask]


def equicontinuity_profile(family, r: float, eps_list) -> EquicontinuityProfile:
    """Sliding-window audit of sup_family of window integrals.

    For each epsilon, reports the largest delta (a grid multiple) such that
    every window of width strictly below delta has integral below epsilon on
    every family member; None when not even single-cell windows qualify.
    """
    prefix_data = []
    for bound in family:
        grid, vals = _restrict(bound, r)
        steps = np.diff(grid)
        cells = 0.5 * (vals[:-1] + vals[1:]) * steps
        prefix = np.concatenate(([0.0], np.cumsum(cells)))
        prefix_data.append((float(bound.step), prefix))

    def max_window(prefix, q):
        if q >= len(prefix):
            return float(prefix[-1])
        return float(np.max(prefix[q:] - prefix[:-q]))

    entries = []
    for eps in eps_list:
        delta = 2.0 * r
        fail = False
        for step, prefix in prefix_data:
            n = len(prefix) - 1
            if max_window(prefix, n) < eps:
                continue  # whole window stays below eps
            lo_q, hi_q = 1, n  # min q with max_window >= eps, by bisection
            if max_window(prefix, 1) >= eps:
                fail = True
                break
            while hi_q - lo_q > 1:
                mid = (lo_q + hi_q) // 2
                if max_window(prefix, mid) >= eps:
                    hi_q = mid
                else:
                    lo_q = mid
            delta = min(delta, hi_q * step)
        entries.append((float(eps), None if fail else float(delta)))
    return EquicontinuityProfile(float(r), tuple(entries))


# ---------------------------------------------------------------------------
# moduli of continuity


@dataclass(frozen=True)
class ThetaFn:
    """Nondecreasing continuous modulus stored piecewise linear, theta(0)=0."""

    s_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        v = np.maximum.accumulate(np.maximum(v, 0.0))  # monotone envelope
        if s[0] != 0.0:
            raise ValueError("s grid must start at 0")
        v[0] = 0.0
        s.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "values", v)

    def __call__(self, s):
        return np.interp(s, self.s_grid, self.values)


def uniform_theta(slope: float, s_max: float = 2.0, knots: int = 256) -> ThetaFn:
    s = np.linspace(0.0, s_max, knots + 1)
    return ThetaFn(s, slope * s)


def _interval_key(interval) -> tuple[float, float]:
    return (float(interval[0]), float(interval[1]))


def _contains(outer, inner) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


class ModulusSet:
    """Family of moduli indexed by (rational interval, integer radius).

    The partial order (larger interval, larger radius gives a pointwise
    larger modulus) is enforced at construction by a monotone envelope pass.
    """

    def __init__(self, entries: dict):
        self.entries = {( _interval_key(i), int(j)): th
                        for (i, j), th in entries.items()}
        self._enforce_order()

    def _enforce_order(self):
        keys = sorted(self.entries, key=lambda k: (k[1], k[0][1] - k[0][0]))
        for pos, key in enumerate(keys):
            iv, j = key
            acc = np.array(self.entries[key].values, dtype=float)
            grid = self.entries[key].s_grid
            for prev in keys[:pos]:
                piv, pj = prev
                if pj <= j and _contains(iv, piv):
                    acc = np.maximum(acc, self.entries[prev](grid))
            self.entries[key] = ThetaFn(grid, acc)

    def theta_for(self, interval, j: int) -> ThetaFn:
        key = (_interval_key(interval), int(j))
        if key not in self.entries:
            raise KeyError(f"no modulus stored for I={key[0]}, j={key[1]}")
        return self.entries[key]

    def items(self):
        return self.entries.items()

    @classmethod
    def uniform(cls, slope: float, intervals, js, s_max: float = 2.0,
                knots: int = 256) -> "ModulusSet":
        return cls({(i, j): uniform_theta(slope, s_max, knots)
                    for i in intervals for j in js})

    def to_csv(self, path, p: float = 1.0):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for (iv, j), th in sorted(self.entries.items()):
                fh.write(f"# I=[{iv[0]!r},{iv[1]!r}] j={j!r} p={p!r}\n")
                writer.writerow(["s", "theta"])
                for s, v in zip(th.s_grid, th.values):
                    writer.writerow([repr(float(s)), repr(float(v))])


def theta_from_mbounds(family, intervals, js, s_max: float = 1.0,
                       s_knots: int = 256, x_density: int = 64) -> ModulusSet:
    """Moduli from sliding integrals of the optimal m-bounds.

    theta_{I,j}(s) = sup over start times in I and family members of the
    integral of the m-bound over [t, t+s], evaluated exactly on the grid.
    """
    if not family:
        raise ValueError("need at least one field")
    entries = {}
    ds = s_max / s_knots
    for interval in intervals:
        a, b = _interval_key(interval)
        n_cells = int(round((b - a + s_max) / ds))
        for j in js:
            sup = np.zeros(s_knots + 1)
            for f in family:
                mb = optimal_m_bound(f, j, (a, b + s_max),
                                     t_samples=n_cells + 1, x_density=x_density)
                steps = np.diff(mb.grid)
                cells = 0.5 * (mb.values[:-1] + mb.values[1:]) * steps
                prefix = np.concatenate(([0.0], np.cumsum(cells)))
                n_start = n_cells - s_knots  # start indices staying in I
                for k in range(1, s_knots + 1):
                    windows = prefix[k:k + n_start + 1] - prefix[:n_start + 1]
                    sup[k] = max(sup[k], float(np.max(windows)))
            entries[((a, b), j)] = ThetaFn(np.arange(s_knots + 1) * ds, sup)
    return ModulusSet(entries)


def theta_from_solutions(fields, intervals, js, policy=None, s_max: float = 1.0,
                         s_knots: int = 64, x0_count: int = 9,
                         t0_count: int = 3) -> ModulusSet:
    """Moduli measured from solution families staying inside the ball.

    Trajectories are launched from a grid of start times and states, truncated
    on exit from the ball, and the envelope of |x(t) - x(s)| over |t - s| <= s
    is returned per (interval, radius).
    """
    from numpy.lib.stride_tricks import sliding_window_view

    from .solver import StepPolicy, integrate  # deferred: solver is a consumer

    for f in fields:
        if f.class_claim != fd.LC:
            raise UnsupportedOperationError("solution moduli need LC fields")
        if f.dim_in != 1:
            raise UnsupportedOperationError("solution moduli implemented for "
                                            "scalar state")
    entries = {}
    for interval in intervals:
        a, b = _interval_key(interval)
        for j in js:
            pol = policy or StepPolicy(dt=min(s_max / s_knots, (b - a) / 64))
            ds = pol.dt * max(1, round(s_max / s_knots / pol.dt))
            knots = int(round(s_max / ds))
            sup = np.zeros(knots + 1)
            for f in fields:
                for t0 in np.linspace(a, b, t0_count)[:-1]:
                    for x0 in np.linspace(-j, j, x0_count):
                        traj = integrate(f, np.full(f.dim_in, x0), (t0, b), pol,
                                         exit_radius=j)
                        xs = traj.x_samples[:, 0]
                        if len(xs) < 2:
                            continue
                        per_step = max(1, round(ds / pol.dt))
                        for k in range(1, knots + 1):
                            w = k * per_step + 1
                            if w > len(xs):
                                sup[k] = max(sup[k], float(xs.max() - xs.min()))
                                continue
                            win = sliding_window_view(xs, w)
                            osc = float(np.max(win.max(axis=1) - win.min(axis=1)))
                            sup[k] = max(sup[k], osc)
            entries[((a, b), j)] = ThetaFn(np.arange(knots + 1) * ds, sup)
    return ModulusSet(entries)
