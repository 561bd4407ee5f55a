"""Evaluable descriptors for Caratheodory vector fields.

A descriptor is an immutable expression tree over a fixed vocabulary
(constants, linear maps, time profiles, shifted-argument composition, sums,
scales, matrix assembly, translations, registered callbacks) together with
structural metadata: dimensions, the ambient L^p exponent, the asserted
regularity class, and an optional declared Jacobian.

Evaluation is pure and deterministic; translating a descriptor rewrites the
tree so repeated translations collapse into a single offset (exact group law).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .profiles import (PiecewiseScalar, PolyProfile, Profile, SharpeningWave,
                       SharpeningWaveIntegral, SquareWave, TriangleWave)

LC, SC, THETA_C = "LC", "SC", "ThetaC"
_CLASSES = (LC, SC, THETA_C)


class DimensionMismatchError(ValueError):
    """State/output dimensions disagree with the descriptor."""


class UnsupportedOperationError(RuntimeError):
    """The descriptor does not support the requested structural operation."""


def _as_array(data) -> np.ndarray:
    return np.asarray(data, dtype=float)


def _freeze(data) -> tuple:
    a = np.asarray(data, dtype=float)
    if a.ndim == 0:
        return (float(a),)
    if a.ndim == 1:
        return tuple(float(v) for v in a)
    return tuple(tuple(float(v) for v in row) for row in a)


# ---------------------------------------------------------------------------
# expression nodes


class Node:
    out_shape: tuple  # (M,) for vector values, (M, K) for matrix values

    def eval_many(self, ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Evaluate at ts[i], xs[i]; returns array of shape (len(ts), *out_shape)."""
        raise NotImplementedError

    def children(self) -> tuple["Node", ...]:
        return ()

    def time_breakpoints(self, lo: float, hi: float, x: np.ndarray) -> np.ndarray:
        """Interior breakpoints in t of t -> value(t, x) for frozen x."""
        cuts: set[float] = set()
        for child in self.children():
            cuts.update(child.time_breakpoints(lo, hi, x).tolist())
        return np.array(sorted(cuts))


@dataclass(frozen=True)
class Constant(Node):
    data: tuple

    @property
    def out_shape(self):
        a = _as_array(self.data)
        return a.shape

    def eval_many(self, ts, xs):
        a = _as_array(self.data)
        return np.broadcast_to(a, (len(ts),) + a.shape).copy()


@dataclass(frozen=True)
class LinearInX(Node):
    matrix: tuple  # (M, N) nested tuples

    @property
    def out_shape(self):
        return (len(self.matrix),)

    def eval_many(self, ts, xs):
        return xs @ _as_array(self.matrix).T


@dataclass(frozen=True)
class TimeFn(Node):
    profile: Profile

    out_shape = (1,)

    def eval_many(self, ts, xs):
        return np.asarray(self.profile(ts), dtype=float).reshape(len(ts), 1)

    def time_breakpoints(self, lo, hi, x):
        return self.profile.breakpoints_in(lo, hi)


@dataclass(frozen=True)
class ShiftCompose(Node):
    """(t, x) -> profile(t + a*x) for scalar state; the worked-example shape."""

    profile: Profile
    a: float

    out_shape = (1,)

    def eval_many(self, ts, xs):
        u = ts + self.a * xs[:, 0]
        return np.asarray(self.profile(u), dtype=float).reshape(len(ts), 1)

    def time_breakpoints(self, lo, hi, x):
        off = self.a * float(np.atleast_1d(x)[0])
        return self.profile.breakpoints_in(lo + off, hi + off) - off


@dataclass(frozen=True)
class Sum(Node):
    terms: tuple

    @property
    def out_shape(self):
        return self.terms[0].out_shape

    def children(self):
        return self.terms

    def eval_many(self, ts, xs):
        acc = self.terms[0].eval_many(ts, xs)
        for term in self.terms[1:]:
            acc = acc + term.eval_many(ts, xs)
        return acc


@dataclass(frozen=True)
class ScalarScale(Node):
    factor: float
    inner: Node

    @property
    def out_shape(self):
        return self.inner.out_shape

    def children(self):
        return (self.inner,)

    def eval_many(self, ts, xs):
        return self.factor * self.inner.eval_many(ts, xs)


@dataclass(frozen=True)
class MatrixAssemble(Node):
    """M x K matrix value built from scalar-valued entry nodes."""

    entries: tuple  # tuple of rows, each a tuple of Nodes with out_shape (1,)

    @property
    def out_shape(self):
        return (len(self.entries), len(self.entries[0]))

    def children(self):
        return tuple(node for row in self.entries for node in row)

    def eval_many(self, ts, xs):
        m, k = self.out_shape
        out = np.empty((len(ts), m, k))
        for i, row in enumerate(self.entries):
            for j, node in enumerate(row):
                out[:, i, j] = node.eval_many(ts, xs)[:, 0]
        return out


@dataclass(frozen=True)
class Translate(Node):
    tau: float
    inner: Node

    @property
    def out_shape(self):
        return self.inner.out_shape

    def children(self):
        return (self.inner,)

    def eval_many(self, ts, xs):
        return self.inner.eval_many(ts + self.tau, xs)

    def time_breakpoints(self, lo, hi, x):
        return self.inner.time_breakpoints(lo + self.tau, hi + self.tau, x) - self.tau


@dataclass(frozen=True)
class Callback(Node):
    """Opaque user evaluator registered under a stable name.

    Bounds, breakpoints and vectorized evaluation are caller-declared; the
    structural machinery treats the node as a black box.
    """

    name: str
    fn: Callable = dc_field(compare=False)
    shape: tuple = (1,)
    vector_fn: Callable | None = dc_field(default=None, compare=False)
    m_bound_fn: Callable | None = dc_field(default=None, compare=False)
    l_bound_fn: Callable | None = dc_field(default=None, compare=False)

    @property
    def out_shape(self):
        return self.shape

    def eval_many(self, ts, xs):
        if self.vector_fn is not None:
            return np.asarray(self.vector_fn(ts, xs), dtype=float)
        out = np.empty((len(ts),) + self.shape)
        for i in range(len(ts)):
            out[i] = self.fn(float(ts[i]), xs[i])
        return out


#: registry used by the serializer to resolve (callback NAME) forms
CALLBACK_REGISTRY: dict[str, Callback] = {}


def register_callback(node: Callback) -> Callback:
    CALLBACK_REGISTRY[node.name] = node
    return node


# ---------------------------------------------------------------------------
# value norms

_POWER_ITER_TOL = 1e-12


def operator_norm(mat: np.ndarray) -> float:
    """Operator 2-norm; closed form up to 2x2, power iteration beyond."""
    m = np.asarray(mat, dtype=float)
    if m.shape == (1, 1):
        return abs(float(m[0, 0]))
    if 1 in m.shape:  # rank one: operator norm equals the Frobenius norm
        return float(np.linalg.norm(m))
    if m.shape == (2, 2):
        g = m.T @ m
        tr = g[0, 0] + g[1, 1]
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        disc = max(tr * tr - 4.0 * det, 0.0)
        return float(np.sqrt(0.5 * (tr + np.sqrt(disc))))
    g = m.T @ m
    v = np.ones(g.shape[0]) / np.sqrt(g.shape[0])
    lam = 0.0
    for _ in range(10_000):
        w = g @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        if abs(nw - lam) <= _POWER_ITER_TOL * max(1.0, nw):
            lam = nw
            break
        lam, v = nw, v_new
    return float(np.sqrt(lam))


def value_norm(value: np.ndarray) -> float:
    """Euclidean norm for vector values, operator 2-norm for matrix values."""
    v = np.asarray(value, dtype=float)
    if v.ndim <= 1:
        return float(np.linalg.norm(v))
    return operator_norm(v)


def batch_norms(values: np.ndarray) -> np.ndarray:
    """Norms of a batch: (K, M) -> euclidean rows, (K, M, N) -> operator norms."""
    v = np.asarray(values, dtype=float)
    if v.ndim == 2:
        return np.sqrt(np.sum(v * v, axis=1))
    if v.shape[1:] == (1, 1):
        return np.abs(v[:, 0, 0])
    return np.array([operator_norm(m) for m in v])


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class FieldDescriptor:
    """A Caratheodory field (t, x) -> R^M (or R^{M x K}) with metadata.

    ``class_claim`` asserts the regularity grade the descriptor is meant to
    live in (LC: locally Lipschitz in x, SC: continuous in x, ThetaC:
    continuous only along modulus-constrained curve families).
    """

    node: Node
    dim_in: int
    p: float = 1.0
    class_claim: str = SC
    jacobian: "FieldDescriptor | None" = None

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("p exponent must be >= 1")
        if self.class_claim not in _CLASSES:
            raise ValueError(f"unknown class claim {self.class_claim!r}")
        if any(isinstance(n, ShiftCompose) for n in iter_nodes(self.node)) \
                and self.dim_in != 1:
            raise DimensionMismatchError("shift-composed profiles need scalar state")

    @property
    def out_shape(self) -> tuple:
        return self.node.out_shape

    @property
    def dim_out(self) -> int:
        return self.out_shape[0]

    @property
    def is_matrix_valued(self) -> bool:
        return len(self.out_shape) == 2


def iter_nodes(node: Node):
    yield node
    for child in node.children():
        yield from iter_nodes(child)


def _check_state(f: FieldDescriptor, x) -> np.ndarray:
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if xv.shape != (f.dim_in,):
        raise DimensionMismatchError(
            f"state has shape {xv.shape}, field expects ({f.dim_in},)")
    return xv


def evaluate(f: FieldDescriptor, t: float, x) -> np.ndarray:
    """Pointwise value f(t, x) as an array of shape ``f.out_shape``."""
    xv = _check_state(f, x)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    return f.node.eval_many(np.array([float(t)]), xv[None, :])[0]


def evaluate_many(f: FieldDescriptor, ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:  # frozen state broadcast
        xs = np.broadcast_to(_check_state(f, xs), (len(ts), f.dim_in))
    if xs.shape != (len(ts), f.dim_in):
        raise DimensionMismatchError("batch state shape mismatch")
    return f.node.eval_many(ts, xs)


def time_breakpoints(f: FieldDescriptor, lo: float, hi: float, x) -> np.ndarray:
    return f.node.time_breakpoints(lo, hi, _check_state(f, x))


def translate(f: FieldDescriptor, tau: float) -> FieldDescriptor:
    """Time translation: evaluate(translate(f, tau), s, x) == evaluate(f, s+tau, x).

    Nested translations collapse into a single offset, so the group law holds
    exactly at the descriptor level.
    """
    if tau == 0.0:
        return f
    node = f.node
    if isinstance(node, Translate):
        node = Translate(node.tau + tau, node.inner)
    else:
        node = Translate(float(tau), node)
    jac = translate(f.jacobian, tau) if f.jacobian is not None else None
    return FieldDescriptor(node, f.dim_in, f.p, f.class_claim, jac)


# ---------------------------------------------------------------------------
# Jacobians


def _scalar_jacobian_node(node: Node) -> Node:
    """d/dx rules for scalar-state scalar-valued trees."""
    if isinstance(node, Constant):
        return Constant((0.0,))
    if isinstance(node, LinearInX):
        return Constant((float(node.matrix[0][0]),))
    if isinstance(node, TimeFn):
        return Constant((0.0,))
    if isinstance(node, ShiftCompose):
        d = node.profile.derivative()
        if d is None:
            raise UnsupportedOperationError("profile has no derivative")
        return ScalarScale(node.a, ShiftCompose(d, node.a))
    if isinstance(node, Sum):
        return Sum(tuple(_scalar_jacobian_node(t) for t in node.terms))
    if isinstance(node, ScalarScale):
        return ScalarScale(node.factor, _scalar_jacobian_node(node.inner))
    if isinstance(node, Translate):
        return Translate(node.tau, _scalar_jacobian_node(node.inner))
    raise UnsupportedOperationError(
        f"no analytic x-derivative for {type(node).__name__}; declare one")


def jacobian_field(f: FieldDescriptor) -> FieldDescriptor:
    """Declared Jacobian if present, else the analytically derived one.

    For scalar state the result is scalar-valued (the 1x1 case); for N >= 2
    only declared Jacobians and linear/constant trees are supported.
    """
    if f.jacobian is not None:
        return f.jacobian
    if f.dim_in == 1 and f.out_shape == (1,):
        return FieldDescriptor(_scalar_jacobian_node(f.node), 1, f.p, SC)
    node = f.node
    if isinstance(node, LinearInX):
        return FieldDescriptor(Constant(node.matrix), f.dim_in, f.p, SC)
    if isinstance(node, Constant) and len(node.out_shape) == 1:
        zeros = _freeze(np.zeros((node.out_shape[0], f.dim_in)))
        return FieldDescriptor(Constant(zeros), f.dim_in, f.p, SC)
    raise UnsupportedOperationError(
        "Jacobian not declared and not derivable for this tree")


# ---------------------------------------------------------------------------
# builders


def constant(value, dim_in: int = 1, p: float = 1.0) -> FieldDescriptor:
    return FieldDescriptor(Constant(_freeze(value)), dim_in, p, LC)


def linear(matrix, p: float = 1.0) -> FieldDescriptor:
    mat = np.atleast_2d(_as_array(matrix))
    node = LinearInX(_freeze(mat))
    jac = FieldDescriptor(Constant(_freeze(mat)), mat.shape[1], p, SC) \
        if mat.shape != (1, 1) else \
        FieldDescriptor(Constant((float(mat[0, 0]),)), 1, p, SC)
    return FieldDescriptor(node, mat.shape[1], p, LC, jacobian=jac)


def time_only(profile: Profile, p: float = 1.0, dim_in: int = 1,
              class_claim: str = LC) -> FieldDescriptor:
    return FieldDescriptor(TimeFn(profile), dim_in, p, class_claim)


def shift_composed(profile: Profile, a: float, p: float = 1.0,
                   class_claim: str = LC,
                   with_jacobian: bool = True) -> FieldDescriptor:
    jac = None
    if with_jacobian:
        d = profile.derivative()
        if d is not None:
            jac_claim = SC if d.continuous else THETA_C
            jac = FieldDescriptor(ScalarScale(a, ShiftCompose(d, a)), 1, p, jac_claim)
    return FieldDescriptor(ShiftCompose(profile, a), 1, p, class_claim, jacobian=jac)


def field_sum(f: FieldDescriptor, g: FieldDescriptor,
              class_claim: str | None = None) -> FieldDescriptor:
    if (f.dim_in, f.out_shape, f.p) != (g.dim_in, g.out_shape, g.p):
        raise DimensionMismatchError("sum of incompatible descriptors")
    claim = class_claim
    if claim is None:
        order = {LC: 0, SC: 1, THETA_C: 2}
        claim = max((f.class_claim, g.class_claim), key=order.__getitem__)
    jac = None
    if f.jacobian is not None and g.jacobian is not None \
            and f.jacobian.out_shape == g.jacobian.out_shape:
        jac = field_sum(f.jacobian, g.jacobian)
    return FieldDescriptor(Sum((f.node, g.node)), f.dim_in, f.p, claim, jac)


def field_scale(c: float, f: FieldDescriptor) -> FieldDescriptor:
    jac = field_scale(c, f.jacobian) if f.jacobian is not None else None
    return FieldDescriptor(ScalarScale(float(c), f.node), f.dim_in, f.p,
                           f.class_claim, jac)


def field_difference(f: FieldDescriptor, g: FieldDescriptor) -> FieldDescriptor:
    return field_sum(f, field_scale(-1.0, g), class_claim=None)


def sharpening_wave(p: float = 1.0) -> FieldDescriptor:
    """Time-only trapezoid wave with sharpening ramps (continuous)."""
    return time_only(SharpeningWave(), p)


def square_wave(p: float = 1.0) -> FieldDescriptor:
    """Time-only square-wave limit of the sharpening wave (a.e. pointwise)."""
    return time_only(SquareWave(), p, class_claim=LC)


def sharpening_wave_integral(p: float = 1.0) -> FieldDescriptor:
    """Time-only running integral of the sharpening wave (piecewise quadratic)."""
    return time_only(SharpeningWaveIntegral(), p)


def triangle_wave(p: float = 1.0) -> FieldDescriptor:
    """Time-only triangle wave, the running integral of the square wave."""
    return time_only(TriangleWave(), p)


def wave_shift_family(p: float = 1.0):
    """The worked-example quadruple (f, F, g, G) on scalar state.

    f(t,x) = wave_integral(t + x/3) with Jacobian F(t,x) = wave(t + x/3)/3;
    g and G are the corresponding translation limits built from the square
    and triangle waves.  F is continuous in x, G is not.
    """
    a = 1.0 / 3.0
    big_f = FieldDescriptor(ScalarScale(a, ShiftCompose(SharpeningWave(), a)),
                            1, p, SC)
    f = FieldDescriptor(ShiftCompose(SharpeningWaveIntegral(), a), 1, p, LC,
                        jacobian=big_f)
    big_g = FieldDescriptor(ScalarScale(a, ShiftCompose(SquareWave(), a)),
                            1, p, THETA_C)
    g = FieldDescriptor(ShiftCompose(TriangleWave(), a), 1, p, LC,
                        jacobian=big_g)
    return f, big_f, g, big_g
