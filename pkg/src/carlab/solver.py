"""Initial value problems with measurable-in-time right-hand sides.

The steppers integrate the time slices by quadrature of t -> f(t, x_frozen)
(midpoint rule split at declared breakpoints), which discretizes the integral
equation directly and keeps its order for fields that are merely measurable
in t.  Blow-up is detected by a radius threshold standing in for the finite
end of the maximal interval.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import field as fd
from .field import FieldDescriptor

COMPLETE = "complete"
BLOWUP = "truncated_blowup"
EXIT = "truncated_exit"


class SolverEvaluationError(RuntimeError):
    """The right-hand side produced a non-finite value."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t!r}")
        self.t = t


class PicardNonContractionError(RuntimeError):
    """Fixed-point residuals grew; the span is too long for contraction."""


class MaximalIntervalError(RuntimeError):
    """Requested time lies past the (numerically detected) maximal interval."""

    def __init__(self, exit_time: float, status: str):
        super().__init__(f"trajectory {status} at t={exit_time!r}")
        self.exit_time = exit_time
        self.status = status


@dataclass(frozen=True)
class StepPolicy:
    """Base step, slice quadrature subsamples, scheme, and blow-up radius."""

    dt: float = 1e-3
    subsamples: int = 4
    scheme: str = "averaged_heun"
    r_max: float = 1e6

    def __post_init__(self):
        if self.dt <= 0 or self.subsamples < 1 or self.r_max <= 0:
            raise ValueError("invalid step policy")
        if self.scheme not in ("averaged_euler", "averaged_heun"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class Trajectory:
    t_samples: np.ndarray
    x_samples: np.ndarray            # (n, N)
    y_samples: np.ndarray | None = None
    status: str = COMPLETE
    exit_time: float | None = None

    def __post_init__(self):
        if np.any(np.diff(self.t_samples) <= 0) and len(self.t_samples) > 1:
            raise ValueError("time grid must be strictly increasing")

    @property
    def final_state(self) -> np.ndarray:
        return self.x_samples[-1]

    def state_at(self, t: float) -> np.ndarray:
        cols = [np.interp(t, self.t_samples, self.x_samples[:, i])
                for i in range(self.x_samples.shape[1])]
        return np.array(cols)

    def y_at(self, t: float) -> np.ndarray:
        cols = [np.interp(t, self.t_samples, self.y_samples[:, i])
                for i in range(self.y_samples.shape[1])]
        return np.array(cols)

    def sup_distance(self, other: "Trajectory") -> float:
        """Sup over this trajectory's grid of |x(t) - other.x(t)|."""
        diffs = [np.linalg.norm(x - other.state_at(t))
                 for t, x in zip(self.t_samples, self.x_samples)]
        return float(np.max(diffs))

    def to_csv(self, path):
        n = self.x_samples.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["t"] + [f"x{i}" for i in range(n)]
            if self.y_samples is not None:
                header += [f"y{i}" for i in range(self.y_samples.shape[1])]
            writer.writerow(header)
            for k, t in enumerate(self.t_samples):
                row = [repr(float(t))] + [repr(float(v)) for v in self.x_samples[k]]
                if self.y_samples is not None:
                    row += [repr(float(v)) for v in self.y_samples[k]]
                writer.writerow(row)
            fh.write(f"# status: {self.status}"
                     + (f" exit_time={self.exit_time!r}" if self.exit_time
                        is not None else "") + "\n")


def _slice_quadrature_points(f: FieldDescriptor, t0: float, t1: float,
                             x: np.ndarray, m: int):
    """Midpoint nodes and weights over [t0, t1], split at declared breakpoints."""
    inner = f.node.time_breakpoints(t0, t1, x)
    if len(inner) == 0:  # smooth slice: plain composite midpoint
        h = (t1 - t0) / m
        return t0 + h * (np.arange(m) + 0.5), np.full(m, h)
    cuts = sorted({t0, t1, *(float(c) for c in inner if t0 < c < t1)})
    ts, ws = [], []
    span = t1 - t0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n_pts = max(1, int(np.ceil(m * (b - a) / span)))
        h = (b - a) / n_pts
        ts.append(a + h * (np.arange(n_pts) + 0.5))
        ws.append(np.full(n_pts, h))
    return np.concatenate(ts), np.concatenate(ws)


def _slice_integral(f: FieldDescriptor, t0: float, t1: float,
                    x: np.ndarray, m: int) -> np.ndarray:
    ts, ws = _slice_quadrature_points(f, t0, t1, x, m)
    vals = f.node.eval_many(ts, np.broadcast_to(x, (len(ts), len(x))))
    if not np.all(np.isfinite(vals)):
        raise SolverEvaluationError("non-finite field value", t0)
    return ws @ vals


def integrate(f: FieldDescriptor, x0, span, policy: StepPolicy | None = None,
              exit_radius: float | None = None) -> Trajectory:
    """Solve dx/dt = f(t, x) with x(span[0]) = x0 forward to span[1].

    Truncates with BLOWUP status past the policy radius (the finite proxy for
    the maximal interval) and with EXIT status past ``exit_radius``.
    """
    _require_lc(f)
    policy = policy or StepPolicy()
    t0, t1 = float(span[0]), float(span[1])
    if t1 < t0:
        raise ValueError("spans must run forward in time")
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if x.shape != (f.dim_in,):
        raise fd.DimensionMismatchError("initial state has wrong dimension")
    n = max(1, int(round((t1 - t0) / policy.dt))) if t1 > t0 else 0
    dt = (t1 - t0) / n if n else 0.0
    ts = [t0]
    xs = [x.copy()]
    status, exit_time = COMPLETE, None
    for k in range(n):
        a = t0 + k * dt
        b = t0 + (k + 1) * dt if k < n - 1 else t1
        inc = _slice_integral(f, a, b, x, policy.subsamples)
        if policy.scheme == "averaged_heun":
            pred = x + inc
            inc = 0.5 * (inc + _slice_integral(f, a, b, pred, policy.subsamples))
        x = x + inc
        ts.append(b)
        xs.append(x.copy())
        radius = float(np.linalg.norm(x))
        if radius > policy.r_max:
            status, exit_time = BLOWUP, b
            break
        if exit_radius is not None and radius > exit_radius:
            status, exit_time = EXIT, b
            break
    return Trajectory(np.array(ts), np.array(xs), None, status, exit_time)


def _require_lc(f: FieldDescriptor):
    if f.class_claim != fd.LC:
        raise fd.UnsupportedOperationError(
            "integration needs an LC field; use integrate_non_lipschitz to "
            "accept the non-uniqueness risk explicitly")


def integrate_non_lipschitz(f: FieldDescriptor, x0, span,
                            policy: StepPolicy | None = None,
                            exit_radius: float | None = None) -> Trajectory:
    """Explicit override for SC fields; solutions may fail to be unique."""
    import warnings
    warnings.warn("integrating a non-Lipschitz field: the computed solution "
                  "need not be unique", stacklevel=2)
    g = FieldDescriptor(f.node, f.dim_in, f.p, fd.LC, f.jacobian)
    return integrate(g, x0, span, policy, exit_radius)


def _matrix_value(vals: np.ndarray, n: int) -> np.ndarray:
    # scalar-valued Jacobians stand in for the 1x1 matrix case
    if vals.ndim == 2 and vals.shape[1] == 1 and n == 1:
        return vals[:, :, None]
    return vals


def integrate_triangular(f: FieldDescriptor, big_f: FieldDescriptor,
                         h: FieldDescriptor, x0, y0, span,
                         policy: StepPolicy | None = None) -> Trajectory:
    """Solve dx/dt = f(t,x), dy/dt = F(t,x) y + h(t,x) on the shared interval.

    The x component is solved first; the linear y equation then runs along
    the interpolated x path with the same averaged scheme.
    """
    policy = policy or StepPolicy()
    base = integrate(f, x0, span, policy)
    n_dim = base.x_samples.shape[1]
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    if y.shape != (n_dim,):
        raise fd.DimensionMismatchError("y0 has wrong dimension")
    ys = [y.copy()]
    nodes, weights = _midpoint_rule(policy.subsamples)
    for k in range(len(base.t_samples) - 1):
        a, b = base.t_samples[k], base.t_samples[k + 1]
        xa, xb = base.x_samples[k], base.x_samples[k + 1]
        ts = a + (b - a) * nodes
        xs = xa[None, :] + nodes[:, None] * (xb - xa)[None, :]
        fv = _matrix_value(big_f.node.eval_many(ts, xs), n_dim)
        hv = h.node.eval_many(ts, xs)
        if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(hv))):
            raise SolverEvaluationError("non-finite coefficient value", float(a))
        amat = (b - a) * np.tensordot(weights, fv, axes=(0, 0))
        bvec = (b - a) * (weights @ hv)
        inc = amat @ y + bvec
        if policy.scheme == "averaged_heun":
            pred = y + inc
            inc = 0.5 * (inc + amat @ pred + bvec)
        y = y + inc
        ys.append(y.copy())
    return Trajectory(base.t_samples, base.x_samples, np.array(ys),
                      base.status, base.exit_time)


def _midpoint_rule(m: int):
    nodes = (np.arange(m) + 0.5) / m
    return nodes, np.full(m, 1.0 / m)


def picard_oracle(f: FieldDescriptor, x0, span, grid_n: int = 2000,
                  iterations: int = 80, tol: float = 1e-10) -> Trajectory:
    """Fixed-point iteration of the integral operator on a dense grid.

    Independent of the steppers: cross-validates their output where the span
    contracts (rule of thumb: the l-bound integral over the span below 1/2).
    """
    t0, t1 = float(span[0]), float(span[1])
    ts = np.linspace(t0, t1, grid_n + 1)
    x0v = np.atleast_1d(np.asarray(x0, dtype=float))
    xs = np.tile(x0v, (grid_n + 1, 1))
    changes = []
    for _ in range(iterations):
        vals = f.node.eval_many(ts, xs)
        if not np.all(np.isfinite(vals)):
            raise SolverEvaluationError("non-finite field value", t0)
        # cumulative trapezoid of t -> f(t, x(t))
        steps = np.diff(ts)[:, None]
        increments = 0.5 * (vals[:-1] + vals[1:]) * steps
        new_xs = x0v[None, :] + np.concatenate(
            [np.zeros((1, len(x0v))), np.cumsum(increments, axis=0)])
        change = float(np.max(np.abs(new_xs - xs)))
        xs = new_xs
        changes.append(change)
        if change < tol:
            break
        if len(changes) >= 3 and changes[-1] > changes[-2] > changes[-3] \
                and changes[-1] > 10.0 * changes[0]:
            raise PicardNonContractionError(
                f"residuals grew to {changes[-1]:.3e}; shorten the span")
    return Trajectory(ts, xs, None, COMPLETE, None)


def solver_tolerance(f: FieldDescriptor, x0, span,
                     policy: StepPolicy | None = None) -> float:
    """Step-halving error estimate for one run; the yardstick used by the
    flow-law audits (their observed deviations must stay within 2x this)."""
    policy = policy or StepPolicy()
    coarse = integrate(f, x0, span, policy)
    fine_policy = StepPolicy(policy.dt / 2.0, policy.subsamples, policy.scheme,
                             policy.r_max)
    fine = integrate(f, x0, span, fine_policy)
    if coarse.status != COMPLETE or fine.status != COMPLETE:
        raise MaximalIntervalError(coarse.exit_time or fine.exit_time,
                                   coarse.status)
    sup = coarse.sup_distance(fine)
    return 2.0 * sup + 1e-12
