"""Line integrals of |f(t, x(t))|^p along straight segments and polylines.

Two routes:

* exact -- for scalar fields whose tree is a sum of shifted profiles plus an
  affine part and p = 1.  Between mapped profile breakpoints the integrand is
  a signed polynomial of degree <= 2, so three interior samples reconstruct
  it exactly and |poly| integrates in closed form (splitting at its roots).
* gl -- composite Gauss-Legendre for everything else (matrix values, vector
  norms, callbacks, p != 1).

The exact route is what makes the grid dynamic program and the fixed-point
seminorms reproduce hand-derived values to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import field as fd
from .profiles import Profile

_TINY = 1e-14


@lru_cache(maxsize=None)
def gl_nodes(n: int):
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


# ---------------------------------------------------------------------------
# shifted-profile view of a descriptor tree


@dataclass(frozen=True)
class ProfileTerm:
    weight: float
    profile: Profile
    a: float      # state coefficient inside the argument t + a*x + shift
    shift: float


@dataclass(frozen=True)
class ProfileSum:
    """Scalar field of the form const + lin_t*t + lin_x*x + sum of terms."""

    const: float
    lin_t: float
    lin_x: float
    terms: tuple[ProfileTerm, ...]


def as_profile_sum(node: fd.Node) -> ProfileSum | None:
    """Structural view used by the exact integrator; None when not expressible."""
    if isinstance(node, fd.Constant):
        if node.out_shape != (1,):
            return None
        return ProfileSum(float(node.data[0]), 0.0, 0.0, ())
    if isinstance(node, fd.LinearInX):
        if node.out_shape != (1,) or len(node.matrix[0]) != 1:
            return None
        return ProfileSum(0.0, 0.0, float(node.matrix[0][0]), ())
    if isinstance(node, fd.TimeFn):
        return ProfileSum(0.0, 0.0, 0.0, (ProfileTerm(1.0, node.profile, 0.0, 0.0),))
    if isinstance(node, fd.ShiftCompose):
        return ProfileSum(0.0, 0.0, 0.0,
                          (ProfileTerm(1.0, node.profile, node.a, 0.0),))
    if isinstance(node, fd.Sum):
        parts = [as_profile_sum(t) for t in node.terms]
        if any(p is None for p in parts):
            return None
        return ProfileSum(sum(p.const for p in parts),
                          sum(p.lin_t for p in parts),
                          sum(p.lin_x for p in parts),
                          tuple(t for p in parts for t in p.terms))
    if isinstance(node, fd.ScalarScale):
        inner = as_profile_sum(node.inner)
        if inner is None:
            return None
        c = node.factor
        return ProfileSum(c * inner.const, c * inner.lin_t, c * inner.lin_x,
                          tuple(ProfileTerm(c * t.weight, t.profile, t.a, t.shift)
                                for t in inner.terms))
    if isinstance(node, fd.Translate):
        inner = as_profile_sum(node.inner)
        if inner is None:
            return None
        tau = node.tau
        return ProfileSum(inner.const + inner.lin_t * tau, inner.lin_t,
                          inner.lin_x,
                          tuple(ProfileTerm(t.weight, t.profile, t.a, t.shift + tau)
                                for t in inner.terms))
    return None


def profile_sum_of(f: fd.FieldDescriptor) -> ProfileSum | None:
    if f.dim_in != 1 or f.out_shape != (1,):
        return None
    return as_profile_sum(f.node)


# ---------------------------------------------------------------------------
# exact |quadratic| integration (vectorized)


def _abs_quad_integrals(c0, c1, c2, length):
    """Integral of |c0 + c1 s + c2 s^2| over [0, length], all arrays."""
    c0, c1, c2, length = np.broadcast_arrays(c0, c1, c2, length)
    scale = np.abs(c0) + np.abs(c1) * length + np.abs(c2) * length**2 + _TINY
    r1 = np.zeros_like(c0)
    r2 = np.zeros_like(c0)
    quad = np.abs(c2) * length**2 > 1e-13 * scale
    lin = ~quad & (np.abs(c1) * length > 1e-13 * scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = c1 * c1 - 4.0 * c2 * c0
        has_roots = quad & (disc >= 0.0)
        sq = np.sqrt(np.where(disc > 0.0, disc, 0.0))
        q = -0.5 * (c1 + np.copysign(sq, np.where(c1 == 0.0, 1.0, c1)))
        ra = np.where(has_roots, q / np.where(c2 == 0.0, 1.0, c2), 0.0)
        rb = np.where(has_roots & (q != 0.0), c0 / np.where(q == 0.0, 1.0, q), ra)
        rlin = np.where(lin, -c0 / np.where(c1 == 0.0, 1.0, c1), 0.0)
    r1 = np.where(has_roots, np.minimum(ra, rb), np.where(lin, rlin, 0.0))
    r2 = np.where(has_roots, np.maximum(ra, rb), np.where(lin, rlin, 0.0))
    r1 = np.clip(r1, 0.0, length)
    r2 = np.clip(r2, 0.0, length)

    def prim(s):
        return s * (c0 + s * (0.5 * c1 + s * (c2 / 3.0)))

    return (np.abs(prim(r1)) + np.abs(prim(r2) - prim(r1))
            + np.abs(prim(length) - prim(r2)))


def _quad_coeffs_from_samples(v1, v2, v3, length):
    """Degree-2 coefficients on [0, L] from samples at L/4, L/2, 3L/4."""
    with np.errstate(divide="ignore", invalid="ignore"):
        c2 = 8.0 * (v1 - 2.0 * v2 + v3) / (length * length)
        c1 = 2.0 * (v3 - v1) / length - c2 * length
    c0 = v2 - 0.5 * c1 * length - 0.25 * c2 * length * length
    return c0, c1, c2


# ---------------------------------------------------------------------------
# segment integrals


def _segment_cuts(ps: ProfileSum, t0: float, t1: float,
                  x0: float, x1: float) -> list[float]:
    """Interior times where the integrand changes polynomial piece."""
    span = t1 - t0
    m = (x1 - x0) / span
    cuts: set[float] = set()
    for term in ps.terms:
        beta = 1.0 + term.a * m
        u0 = t0 + term.a * x0 + term.shift
        u1 = t1 + term.a * x1 + term.shift
        lo, hi = (u0, u1) if u0 <= u1 else (u1, u0)
        if hi - lo <= _TINY * (1.0 + abs(lo)):
            continue
        for bp in term.profile.breakpoints_in(lo, hi):
            t = t0 + (bp - u0) / beta
            if t0 < t < t1:
                cuts.add(float(t))
    return sorted(cuts)


def _eval_signed(f: fd.FieldDescriptor, ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return f.node.eval_many(ts, xs)[:, 0]


def segment_abs_integral(f: fd.FieldDescriptor, t0: float, t1: float,
                         x0, x1, p: float | None = None,
                         method: str = "auto", gl_n: int = 12,
                         gl_sub: int = 4) -> float:
    """Integral of |f(t, x(t))|^p over [t0, t1] along the straight segment.

    a zero-length segment integrates to zero; x0 == x1 covers the frozen
    state case used by pointwise seminorms.
    """
    if p is None:
        p = f.p
    if t1 < t0:
        raise ValueError("segment must run forward in time")
    if t1 == t0:
        return 0.0
    x0v = np.atleast_1d(np.asarray(x0, dtype=float))
    x1v = np.atleast_1d(np.asarray(x1, dtype=float))
    ps = profile_sum_of(f) if p == 1.0 else None
    if method == "exact" and ps is None:
        raise ValueError("exact integration needs p=1 and a profile-sum tree")
    if ps is not None and method in ("auto", "exact"):
        cuts = [t0] + _segment_cuts(ps, t0, t1, float(x0v[0]), float(x1v[0])) + [t1]
        a = np.asarray(cuts[:-1])
        lengths = np.asarray(cuts[1:]) - a
        rel = np.array([0.25, 0.5, 0.75])
        ts = (a[:, None] + lengths[:, None] * rel[None, :]).ravel()
        frac = (ts - t0) / (t1 - t0)
        xs = x0v[None, :] + frac[:, None] * (x1v - x0v)[None, :]
        vals = _eval_signed(f, ts, xs).reshape(len(a), 3)
        c0, c1, c2 = _quad_coeffs_from_samples(vals[:, 0], vals[:, 1],
                                               vals[:, 2], lengths)
        return float(np.sum(_abs_quad_integrals(c0, c1, c2, lengths)))
    # composite Gauss-Legendre on |f|^p, splitting at declared breakpoints
    cuts = [t0]
    if f.dim_in == 1:
        inner = f.node.time_breakpoints(t0, t1, x0v) if np.allclose(x0v, x1v) else \
            (_segment_cuts(ps, t0, t1, float(x0v[0]), float(x1v[0])) if ps else [])
        cuts += [float(c) for c in inner if t0 < c < t1]
    cuts.append(t1)
    cuts = sorted(set(cuts))
    nodes, weights = gl_nodes(gl_n)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        sub = np.linspace(a, b, gl_sub + 1)
        for sa, sb in zip(sub[:-1], sub[1:]):
            ts = sa + (sb - sa) * nodes
            frac = (ts - t0) / (t1 - t0)
            xs = x0v[None, :] + frac[:, None] * (x1v - x0v)[None, :]
            vals = fd.batch_norms(f.node.eval_many(ts, xs))
            total += (sb - sa) * float(np.dot(weights, vals**p))
    return total


def interval_abs_integral(f: fd.FieldDescriptor, lo: float, hi: float,
                          x_point, p: float | None = None, **kw) -> float:
    """Integral of |f(t, x)|^p over [lo, hi] at frozen state x."""
    return segment_abs_integral(f, lo, hi, x_point, x_point, p=p, **kw)


def polyline_abs_integral(f: fd.FieldDescriptor, ts: np.ndarray,
                          xs: np.ndarray, p: float | None = None, **kw) -> float:
    """Integral of |f|^p along the piecewise-linear curve through (ts, xs)."""
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    return sum(segment_abs_integral(f, ts[k], ts[k + 1], xs[k], xs[k + 1],
                                    p=p, **kw)
               for k in range(len(ts) - 1))


# ---------------------------------------------------------------------------
# batched edge costs for the grid dynamic program


def dp_edge_costs(f: fd.FieldDescriptor, interval, n_t: int, cells: np.ndarray,
                  width: int, p: float = 1.0, method: str = "auto",
                  gl_n: int = 4) -> np.ndarray:
    """Cost tensor (n_t, n_x, 2*width+1): edge from cell c to cell c + (o - width).

    Entries for transitions leaving the cell range are -inf.  Costs are the
    exact (or Gauss-Legendre) integrals of |f|^p along the straight edge.
    """
    a, b = float(interval[0]), float(interval[1])
    n_x = len(cells)
    dt = (b - a) / n_t
    n_off = 2 * width + 1
    costs = np.full((n_t, n_x, n_off), -np.inf)
    ps = profile_sum_of(f) if p == 1.0 else None
    use_exact = method == "exact" or (method == "auto" and ps is not None
                                      and n_t * n_x * n_off <= 400_000)
    if use_exact and ps is None:
        raise ValueError("exact edge costs need p=1 and a profile-sum tree")
    if use_exact:
        _fill_exact(costs, f, ps, a, dt, cells, width)
    else:
        _fill_gl(costs, f, a, dt, cells, width, p, gl_n)
    return costs


def _fill_exact(costs, f, ps, a, dt, cells, width):
    n_t, n_x, n_off = costs.shape
    rel = np.array([0.25, 0.5, 0.75])
    seg_a: list[float] = []
    seg_len: list[float] = []
    seg_x0: list[float] = []
    seg_x1: list[float] = []
    owners: list[tuple[int, int, int]] = []
    counts: list[int] = []
    for k in range(n_t):
        t0 = a + k * dt
        t1 = t0 + dt
        for c in range(n_x):
            for o in range(n_off):
                c2 = c + o - width
                if not 0 <= c2 < n_x:
                    continue
                x0, x1 = cells[c], cells[c2]
                cuts = [t0] + _segment_cuts(ps, t0, t1, x0, x1) + [t1]
                owners.append((k, c, o))
                counts.append(len(cuts) - 1)
                for u, v in zip(cuts[:-1], cuts[1:]):
                    seg_a.append(u)
                    seg_len.append(v - u)
                    frac0 = (u - t0) / dt
                    frac1 = (v - t0) / dt
                    seg_x0.append(x0 + frac0 * (x1 - x0))
                    seg_x1.append(x0 + frac1 * (x1 - x0))
    seg_a = np.asarray(seg_a)
    seg_len = np.asarray(seg_len)
    seg_x0 = np.asarray(seg_x0)
    seg_x1 = np.asarray(seg_x1)
    ts = (seg_a[:, None] + seg_len[:, None] * rel[None, :]).ravel()
    xs = (seg_x0[:, None] + (seg_x1 - seg_x0)[:, None] * rel[None, :]).ravel()
    vals = _eval_signed(f, ts, xs[:, None]).reshape(len(seg_a), 3)
    c0, c1, c2 = _quad_coeffs_from_samples(vals[:, 0], vals[:, 1], vals[:, 2],
                                           seg_len)
    seg_int = _abs_quad_integrals(c0, c1, c2, seg_len)
    pos = 0
    for (k, c, o), cnt in zip(owners, counts):
        costs[k, c, o] = float(np.sum(seg_int[pos:pos + cnt]))
        pos += cnt


def _fill_gl(costs, f, a, dt, cells, width, p, gl_n):
    n_t, n_x, n_off = costs.shape
    nodes, weights = gl_nodes(gl_n)
    offs = np.arange(-width, width + 1)
    x0 = cells[:, None]                                   # (n_x, 1)
    idx2 = np.arange(n_x)[:, None] + offs[None, :]        # (n_x, n_off)
    valid = (idx2 >= 0) & (idx2 < n_x)
    x1 = cells[np.clip(idx2, 0, n_x - 1)]                 # (n_x, n_off)
    xq = x0[..., None] + (x1 - x0)[..., None] * nodes     # (n_x, n_off, gl_n)
    for k in range(n_t):
        t0 = a + k * dt
        tq = t0 + dt * nodes                              # (gl_n,)
        ts = np.broadcast_to(tq, xq.shape).ravel()
        xs = xq.ravel()[:, None]
        vals = fd.batch_norms(f.node.eval_many(ts, xs)).reshape(xq.shape)
        integ = dt * np.tensordot(vals**p, weights, axes=([2], [0]))
        costs[k][valid] = integ[valid]
    return costs
