"""Skew-product evolution over sampled hulls: translation on the base,
solution flow in the fiber, and the linearized (variational) semiflow with
its finite-difference verification ladder.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import field as fd
from .field import FieldDescriptor, jacobian_field, translate
from .solver import (COMPLETE, MaximalIntervalError, StepPolicy, Trajectory,
                     integrate, integrate_triangular, solver_tolerance)


@dataclass(frozen=True)
class SkewPoint:
    """Base descriptors paired with the fiber state they carry."""

    base: tuple
    fiber: np.ndarray
    fiber_y: np.ndarray | None = None


@dataclass(frozen=True)
class DecayReport:
    """Ladder of errors with a fitted log-log slope and a verdict flag."""

    params: tuple
    errors: tuple
    slope: float
    passed: bool
    excluded: tuple = ()

    def __post_init__(self):
        p = np.asarray(self.params, dtype=float)
        if len(p) > 1 and not (np.all(np.diff(p) > 0) or np.all(np.diff(p) < 0)):
            raise ValueError("parameter ladder must be strictly monotone")
        if any(e < 0 for e in self.errors):
            raise ValueError("errors must be nonnegative")

    @property
    def ratio(self) -> float:
        if self.errors[0] == 0.0:
            return 0.0 if self.errors[-1] == 0.0 else np.inf
        return self.errors[-1] / self.errors[0]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["param", "error", "slope_running"])
            logs_p, logs_e = [], []
            for prm, err in zip(self.params, self.errors):
                running = ""
                if err > 0:
                    logs_p.append(np.log(prm))
                    logs_e.append(np.log(err))
                    if len(logs_p) > 1:
                        running = repr(float(np.polyfit(logs_p, logs_e, 1)[0]))
                writer.writerow([repr(prm), repr(float(err)), running])
            fh.write(f"# slope: {self.slope!r}\n")
            fh.write(f"# verdict: {'PASS' if self.passed else 'FAIL'}\n")


def _fit_slope(params, errors) -> float:
    pts = [(np.log(p), np.log(e)) for p, e in zip(params, errors) if e > 0]
    if len(pts) < 2:
        return 0.0
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def _guard_complete(traj: Trajectory):
    if traj.status != COMPLETE:
        raise MaximalIntervalError(traj.exit_time, traj.status)


def _zero_like(n_dim: int, p: float) -> FieldDescriptor:
    return fd.constant(np.zeros(n_dim), dim_in=n_dim, p=p)


# ---------------------------------------------------------------------------
# the flows


def phi1(t: float, g: FieldDescriptor, x0, policy: StepPolicy | None = None
         ) -> SkewPoint:
    """(t, g, x0) -> (g_t, x(t, g, x0)); errors past the maximal interval."""
    if t == 0.0:
        return SkewPoint((g,), np.atleast_1d(np.asarray(x0, dtype=float)))
    traj = integrate(g, x0, (0.0, t), policy)
    _guard_complete(traj)
    return SkewPoint((translate(g, t),), traj.final_state)


def phi2(t: float, g: FieldDescriptor, big_g: FieldDescriptor,
         k: FieldDescriptor, x0, y0,
         policy: StepPolicy | None = None) -> SkewPoint:
    """(t, g, G, k, x0, y0) -> translated base plus both solution fibers."""
    if t == 0.0:
        return SkewPoint((g, big_g, k),
                         np.atleast_1d(np.asarray(x0, dtype=float)),
                         np.atleast_1d(np.asarray(y0, dtype=float)))
    traj = integrate_triangular(g, big_g, k, x0, y0, (0.0, t), policy)
    _guard_complete(traj)
    return SkewPoint((translate(g, t), translate(big_g, t), translate(k, t)),
                     traj.final_state, traj.y_samples[-1])


def cocycle_defect_phi1(g: FieldDescriptor, x0, t: float, s: float,
                        policy: StepPolicy | None = None) -> float:
    """|phi1(t+s) - phi1(t) o phi1(s)| on the fiber (base matches exactly)."""
    direct = phi1(t + s, g, x0, policy)
    stage = phi1(s, g, x0, policy)
    relay = phi1(t, stage.base[0], stage.fiber, policy)
    assert relay.base[0] == direct.base[0]
    return float(np.linalg.norm(direct.fiber - relay.fiber))


def cocycle_defect_phi2(g, big_g, k, x0, y0, t: float, s: float,
                        policy: StepPolicy | None = None) -> float:
    direct = phi2(t + s, g, big_g, k, x0, y0, policy)
    stage = phi2(s, g, big_g, k, x0, y0, policy)
    relay = phi2(t, *stage.base, stage.fiber, stage.fiber_y, policy)
    dx = float(np.linalg.norm(direct.fiber - relay.fiber))
    dy = float(np.linalg.norm(direct.fiber_y - relay.fiber_y))
    return max(dx, dy)


# ---------------------------------------------------------------------------
# continuity experiments


def continuity_experiment(seq, limit: FieldDescriptor, x0_seq, x0, span,
                          policy: StepPolicy | None = None,
                          params=None) -> DecayReport:
    """Sup distance of perturbed solutions to the limit solution, per term."""
    ref = integrate(limit, x0, span, policy)
    _guard_complete(ref)
    errors = []
    for f_n, x0_n in zip(seq, x0_seq):
        traj = integrate(f_n, x0_n, span, policy)
        _guard_complete(traj)
        errors.append(traj.sup_distance(ref))
    params = tuple(params) if params is not None \
        else tuple(range(1, len(errors) + 1))
    slope = _fit_slope(params, errors)
    passed = errors[-1] <= errors[0] + 1e-15
    return DecayReport(params, tuple(errors), slope, passed)


def triangular_continuity_experiment(f_seq, big_f_seq, h_seq, limits,
                                     x0_seq, y0_seq, span,
                                     policy: StepPolicy | None = None,
                                     params=None) -> DecayReport:
    """Joint (x, y) sup-error decay for the triangular system."""
    f_lim, big_f_lim, h_lim, x0, y0 = limits
    ref = integrate_triangular(f_lim, big_f_lim, h_lim, x0, y0, span, policy)
    _guard_complete(ref)
    errors = []
    for f_n, big_f_n, h_n, x0_n, y0_n in zip(f_seq, big_f_seq, h_seq,
                                             x0_seq, y0_seq):
        traj = integrate_triangular(f_n, big_f_n, h_n, x0_n, y0_n, span, policy)
        _guard_complete(traj)
        err_x = traj.sup_distance(ref)
        diff_y = [np.linalg.norm(y - ref.y_at(t))
                  for t, y in zip(traj.t_samples, traj.y_samples)]
        errors.append(max(err_x, float(np.max(diff_y))))
    params = tuple(params) if params is not None \
        else tuple(range(1, len(errors) + 1))
    slope = _fit_slope(params, errors)
    passed = errors[-1] <= errors[0] + 1e-15
    return DecayReport(params, tuple(errors), slope, passed)


# ---------------------------------------------------------------------------
# linearization


DEFAULT_EPS_LADDER = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


def linearized_check(f: FieldDescriptor, x0, y0, span,
                     eps_ladder=DEFAULT_EPS_LADDER,
                     policy: StepPolicy | None = None,
                     big_f: FieldDescriptor | None = None,
                     slope_threshold: float = 0.9) -> DecayReport:
    """Finite differences of the flow against the variational fiber.

    err(eps) = sup_t |(x(t, x0 + eps y0) - x(t, x0)) / eps - y(t)|; rungs
    below the solver noise floor are excluded from the slope fit.
    """
    y0v = np.atleast_1d(np.asarray(y0, dtype=float))
    if np.linalg.norm(y0v) > 1.0 + 1e-12:
        raise ValueError("direction y0 must lie in the unit ball")
    jac = big_f if big_f is not None else jacobian_field(f)
    policy = policy or StepPolicy()
    x0v = np.atleast_1d(np.asarray(x0, dtype=float))
    tri = integrate_triangular(f, jac, _zero_like(f.dim_in, f.p), x0v, y0v,
                               span, policy)
    _guard_complete(tri)
    base = integrate(f, x0v, span, policy)
    tol = solver_tolerance(f, x0v, span, policy)
    errors, excluded = [], []
    for eps in eps_ladder:
        pert = integrate(f, x0v + eps * y0v, span, policy)
        _guard_complete(pert)
        finite_diff = (pert.x_samples - base.x_samples) / eps
        err = float(np.max(np.linalg.norm(finite_diff - tri.y_samples, axis=1)))
        errors.append(err)
        if err <= 10.0 * tol / eps:
            excluded.append(eps)  # finite-difference cancellation floor
    fit_pts = [(e, v) for e, v in zip(eps_ladder, errors) if e not in excluded]
    slope = _fit_slope([e for e, _ in fit_pts], [v for _, v in fit_pts]) \
        if len(fit_pts) > 1 else 0.0
    passed = (slope >= slope_threshold) if len(fit_pts) > 1 else \
        all(v <= 10.0 * tol / e for e, v in zip(eps_ladder, errors))
    return DecayReport(tuple(eps_ladder), tuple(errors), slope, passed,
                       tuple(excluded))


def hull_linearized_flow(f: FieldDescriptor, taus, t: float, x0, y0,
                         policy: StepPolicy | None = None,
                         big_f: FieldDescriptor | None = None):
    """Variational evolution across the sampled hull pairs (f_tau, J_tau).

    Returns one (tau, SkewPoint) row per translate; the inhomogeneity is zero
    so the y fiber is the derivative of the x fiber in the y0 direction.
    """
    jac = big_f if big_f is not None else jacobian_field(f)
    zero = _zero_like(f.dim_in, f.p)
    rows = []
    for tau in taus:
        point = phi2(t, translate(f, float(tau)), translate(jac, float(tau)),
                     zero, x0, y0, policy)
        rows.append((float(tau), point))
    return rows
