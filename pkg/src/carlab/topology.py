"""Seminorm families over curve classes, the metrics they generate, and
finite hull approximations with compactness diagnostics.

Three seminorm kinds for a field on an interval I:

* td     -- L^p norm of t -> f(t, x) at a fixed dense point x;
* ttheta -- sup over curves staying in the ball with a prescribed modulus of
  continuity, computed by an exact-on-grid dynamic program (scalar state) or
  a flagged stochastic search (higher dimensions);
* tb     -- sup over all continuous curves in the ball, computed as the L^p
  norm of the optimal m-bound (the pointwise sup integrates to the curve sup
  for product-measurable integrands).

The dynamic program admits one extra state cell of slack per step on top of
theta(dt), so grid refinement never excludes a true curve; its value is a
lower-bound estimate that is nondecreasing under the paired refinement
(n_t, n_x) -> (2 n_t, 2 n_x - 1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import bounds as bnd
from . import field as fd
from . import quadrature as quad
from ._kernels import dp_forward
from .bounds import ModulusSet, ThetaFn
from .field import FieldDescriptor, field_difference


# ---------------------------------------------------------------------------
# indices and curves


@dataclass(frozen=True)
class SeminormIndex:
    kind: str                       # 'tb' | 'td' | 'ttheta'
    interval: tuple[float, float]
    j: int | None = None            # tb / ttheta
    x_point: tuple | None = None    # td

    def __post_init__(self):
        if self.kind not in ("tb", "td", "ttheta"):
            raise ValueError(f"unknown seminorm kind {self.kind!r}")
        if self.kind == "td" and self.x_point is None:
            raise ValueError("td index needs a dense point")
        if self.kind != "td" and (self.j is None or self.j < 1):
            raise ValueError("ball index must be a positive integer")


@dataclass(frozen=True)
class SeminormValue:
    index: SeminormIndex
    value: float
    heuristic: bool = False


@dataclass(frozen=True)
class AdmissibleCurve:
    """Grid curve in the ball of radius j admitting theta as modulus."""

    ts: np.ndarray
    nodes: np.ndarray               # (n, N)
    radius: float
    theta: ThetaFn

    def validate(self, tol: float = 1e-9) -> bool:
        norms = np.linalg.norm(self.nodes, axis=1)
        if np.any(norms > self.radius + tol):
            return False
        n = len(self.ts)
        for i in range(n):
            gaps = np.abs(self.ts[i + 1:] - self.ts[i])
            moves = np.linalg.norm(self.nodes[i + 1:] - self.nodes[i], axis=1)
            if np.any(moves > np.asarray(self.theta(gaps)) + tol):
                return False
        return True


def dyadic_points(count: int, max_abs: float = 8.0) -> list[float]:
    """Countable dense set enumeration: by denominator exponent, then magnitude."""
    out: list[float] = []
    exponent = 0
    while len(out) < count:
        den = 2 ** exponent
        if exponent == 0:
            level = [0.0] if not out else []
            k = 1
            while k <= max_abs:
                level += [float(k), float(-k)]
                k += 1
        else:
            level = []
            k = 1
            while k / den <= max_abs:
                if k % 2 == 1:  # reduced fractions only
                    level += [k / den, -k / den]
                k += 1
        out.extend(level)
        exponent += 1
        if exponent > 40:
            raise ValueError("cannot enumerate enough dyadic points")
    return out[:count]


# ---------------------------------------------------------------------------
# the three seminorms


def seminorm_td(f: FieldDescriptor, interval, x_point, p: float | None = None,
                **kw) -> float:
    """L^p norm over the interval of the field frozen at a dense point."""
    p = p if p is not None else f.p
    a, b = float(interval[0]), float(interval[1])
    return quad.interval_abs_integral(f, a, b, x_point, p=p, **kw) ** (1.0 / p)


def seminorm_tb(f: FieldDescriptor, interval, j: int, p: float | None = None,
                t_samples: int = 2049, x_density: int = 64) -> float:
    """Curve supremum over C(I, B_j), via the optimal m-bound integral."""
    p = p if p is not None else f.p
    mb = bnd.optimal_m_bound(f, j, interval, t_samples, x_density)
    mb = bnd.SampledBound(mb.window, mb.values, p)
    return bnd.lp_norm(mb)


def transition_width(theta, dt: float, cell: float, n_x: int) -> tuple[int, int]:
    """Cells reachable per one and per two steps: floor(theta / cell).

    Rounding the reach down keeps every grid curve inside the admissible
    class (so the program certifies a lower bound of the true supremum), and
    the gap-2 cap guards concave moduli against step-level wander adding up.
    """
    width = int(np.floor(float(theta(dt)) / cell + 1e-9))
    width = max(0, min(width, n_x - 1))
    pair = int(np.floor(float(theta(2.0 * dt)) / cell + 1e-9))
    pair = max(0, min(pair, 2 * (n_x - 1)))
    return width, pair


def seminorm_ttheta(f: FieldDescriptor, interval, j: int, theta,
                    resolution: tuple[int, int] = (64, 61),
                    p: float | None = None, method: str = "auto",
                    gl_n: int = 4, details: bool = False,
                    rng_seed: int = 0, search_iters: int = 400):
    """Curve supremum over the modulus-constrained class, from below.

    Scalar state runs the exact-on-grid dynamic program; for dim_in >= 2 a
    hill-climbing search over random admissible curves is used instead and
    the result is flagged heuristic.
    """
    p = p if p is not None else f.p
    a, b = float(interval[0]), float(interval[1])
    index = SeminormIndex("ttheta", (a, b), j=j)
    if f.dim_in == 1:
        n_t, n_x = resolution
        cells = np.linspace(-float(j), float(j), n_x)
        dt = (b - a) / n_t
        width, pair = transition_width(theta, dt, cells[1] - cells[0], n_x)
        costs = quad.dp_edge_costs(f, (a, b), n_t, cells, width, p=p,
                                   method=method, gl_n=gl_n)
        value = dp_forward(costs, pair) ** (1.0 / p)
        return SeminormValue(index, value, False) if details else value
    value = _ttheta_search(f, (a, b), j, theta, resolution, p, rng_seed,
                           search_iters)
    return SeminormValue(index, value, True) if details else value


def _ttheta_search(f, interval, j, theta, resolution, p, rng_seed, iters):
    # stochastic lower bound: random admissible seeds + nodewise hill climbing
    rng = np.random.default_rng(rng_seed)
    n_t = resolution[0]
    a, b = interval
    ts = np.linspace(a, b, n_t + 1)
    dt = (b - a) / n_t
    step_cap = float(theta(dt))
    dim = f.dim_in

    def clip_ball(xs):
        norms = np.linalg.norm(xs, axis=1, keepdims=True)
        scale = np.minimum(1.0, j / np.maximum(norms, 1e-300))
        return xs * scale

    def curve_value(xs):
        return quad.polyline_abs_integral(f, ts, xs, p=p, gl_n=6, gl_sub=1)

    best = -np.inf
    best_xs = None
    for _ in range(max(1, iters // 40)):
        x0 = rng.uniform(-j, j, size=dim) / np.sqrt(dim)
        steps = rng.uniform(-step_cap, step_cap, size=(n_t, dim)) / np.sqrt(dim)
        xs = clip_ball(np.vstack([x0, x0 + np.cumsum(steps, axis=0)]))
        val = curve_value(xs)
        if val > best:
            best, best_xs = val, xs
    for _ in range(iters):
        idx = int(rng.integers(0, n_t + 1))
        cand = best_xs.copy()
        cand[idx] += rng.normal(0.0, 0.25 * (step_cap + j / 8.0), size=dim)
        cand = clip_ball(cand)
        curve = AdmissibleCurve(ts, cand, float(j), _as_theta(theta))
        if not curve.validate(tol=1e-9):
            continue
        val = curve_value(cand)
        if val > best:
            best, best_xs = val, cand
    return best ** (1.0 / p)


def _as_theta(theta) -> ThetaFn:
    if isinstance(theta, ThetaFn):
        return theta
    s = np.linspace(0.0, 8.0, 257)
    return ThetaFn(s, np.asarray(theta(s), dtype=float))


def evaluate_index(f: FieldDescriptor, index: SeminormIndex,
                   theta=None, **kw) -> SeminormValue:
    if index.kind == "td":
        return SeminormValue(index, seminorm_td(f, index.interval,
                                                np.asarray(index.x_point), **kw))
    if index.kind == "tb":
        return SeminormValue(index, seminorm_tb(f, index.interval, index.j, **kw))
    res = seminorm_ttheta(f, index.interval, index.j, theta, details=True, **kw)
    return res


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class MetricConfig:
    """Standard countable-seminorm metric: sum of 2^-k cap(p_k(f - g)).

    Indices enumerate I_n = [-n, n] outermost, then ball radii (tb, ttheta)
    or the dense-point enumeration (td); cap(u) = u / (1 + u).
    """

    n_max: int = 4
    j_max: int = 4
    d_count: int = 4
    theta: ModulusSet | None = None
    resolution: tuple[int, int] = (32, 33)
    t_samples: int = 513
    x_density: int = 32
    quad_method: str = "auto"
    gl_n: int = 4

    def indices(self, kind: str, dim_in: int = 1):
        out = []
        for n in range(1, self.n_max + 1):
            interval = (-float(n), float(n))
            if kind == "td":
                for x in dyadic_points(self.d_count, max_abs=float(self.j_max)):
                    out.append(SeminormIndex("td", interval,
                                             x_point=(x,) * dim_in))
            else:
                for j in range(1, self.j_max + 1):
                    out.append(SeminormIndex(kind, interval, j=j))
        return out

    def theta_for(self, interval, j: int):
        if self.theta is None:
            return bnd.uniform_theta(2.0, s_max=2.0 * self.n_max)
        return self.theta.theta_for(interval, j)


def metric(f: FieldDescriptor, g: FieldDescriptor, cfg: MetricConfig,
           kind: str) -> float:
    """Translation-invariant metric of the chosen topology kind."""
    if (f.dim_in, f.out_shape, f.p) != (g.dim_in, g.out_shape, g.p):
        raise fd.DimensionMismatchError("metric needs matching descriptors")
    diff = field_difference(f, g)
    total = 0.0
    for k, index in enumerate(cfg.indices(kind, f.dim_in), start=1):
        if index.kind == "td":
            val = seminorm_td(diff, index.interval, np.asarray(index.x_point))
        elif index.kind == "tb":
            val = seminorm_tb(diff, index.interval, index.j,
                              t_samples=cfg.t_samples, x_density=cfg.x_density)
        else:
            theta = cfg.theta_for(index.interval, index.j)
            val = seminorm_ttheta(diff, index.interval, index.j, theta,
                                  resolution=cfg.resolution,
                                  method=cfg.quad_method, gl_n=cfg.gl_n)
            val = val.value if isinstance(val, SeminormValue) else val
        total += 2.0 ** (-k) * (val / (1.0 + val))
    return total


@dataclass(frozen=True)
class DecayTable:
    """Distances of a sequence to its limit, with simple trend statistics."""

    params: tuple
    distances: tuple

    @property
    def ratio(self) -> float:
        if self.distances[0] == 0.0:
            return 0.0 if self.distances[-1] == 0.0 else np.inf
        return self.distances[-1] / self.distances[0]

    @property
    def fraction_decreasing(self) -> float:
        d = np.asarray(self.distances)
        if len(d) < 2:
            return 1.0
        return float(np.mean(np.diff(d) <= 1e-15))

    def to_csv(self, path, verdict: str | None = None):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["param", "distance"])
            for k, dist in zip(self.params, self.distances):
                writer.writerow([repr(k), repr(float(dist))])
            fh.write(f"# ratio: {self.ratio!r}\n")
            if verdict is not None:
                fh.write(f"# verdict: {verdict}\n")


def convergence_diagnostic(seq, limit: FieldDescriptor, cfg: MetricConfig,
                           kind: str, params=None) -> DecayTable:
    dists = tuple(metric(f, limit, cfg, kind) for f in seq)
    params = tuple(params) if params is not None else tuple(range(1, len(seq) + 1))
    return DecayTable(params, dists)


# ---------------------------------------------------------------------------
# hulls


def hull_sample(f: FieldDescriptor, taus) -> list[FieldDescriptor]:
    """The finite translate family standing in for the orbit of f."""
    return [fd.translate(f, float(tau)) for tau in taus]


def eps_net(points, cfg: MetricConfig, kind: str, eps: float,
            distances: np.ndarray | None = None):
    """Greedy farthest-point net: every point within eps of some net member.

    Returns (net indices, achieved coverage radius).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = len(points)
    if distances is None:
        distances = np.zeros((n, n))
        for i in range(n):
            for k in range(i + 1, n):
                d = metric(points[i], points[k], cfg, kind)
                distances[i, k] = distances[k, i] = d
    net = [0]
    cover = distances[0].copy()
    while np.max(cover) > eps:
        nxt = int(np.argmax(cover))
        net.append(nxt)
        cover = np.minimum(cover, distances[nxt])
    return net, float(np.max(cover))


@dataclass(frozen=True)
class ProbeRow:
    x_point: tuple
    sup_norm: float
    bounded_pass: bool
    uc_table: tuple               # ((eps, delta | None), ...)
    uc_pass: bool


@dataclass(frozen=True)
class CompactnessReport:
    radius: float
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(r.bounded_pass and r.uc_pass for r in self.rows)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "sup_norm", "bounded", "epsilon", "delta"])
            for row in self.rows:
                for eps, delta in row.uc_table:
                    writer.writerow([repr(row.x_point), repr(row.sup_norm),
                                     "PASS" if row.bounded_pass else "FAIL",
                                     repr(eps),
                                     "FAIL" if delta is None else repr(delta)])
            fh.write(f"# verdict: {'PASS' if self.passed else 'FAIL'}\n")


def hull_compactness_test(f: FieldDescriptor, x_probes, r: float, eps_list,
                          tau_max: float = 16.0, tau_count: int = 33,
                          deltas=(0.001, 0.003, 0.01, 0.03, 0.1, 0.3),
                          growth_tol: float = 0.25) -> CompactnessReport:
    """Boundedness and uniform continuity of t -> f_t(., x) in L^p[-r, r].

    Boundedness compares the norm sup over the far half of the translate
    ladder against the near half; growth beyond the tolerance fails (a
    bounded orbit may still approach its sup, hence the generous default).
    Uniform continuity reports the largest delta from the ladder meeting
    each eps.
    """
    taus = np.linspace(-tau_max, tau_max, tau_count)
    rows = []
    for x in x_probes:
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        norms = np.array([seminorm_td(fd.translate(f, t), (-r, r), xv)
                          for t in taus])
        near = norms[np.abs(taus) <= tau_max / 2]
        far = norms[np.abs(taus) > tau_max / 2]
        bounded = bool(np.max(far, initial=0.0)
                       <= (1.0 + growth_tol) * np.max(near) + 1e-9)
        table = []
        ok = True
        for eps in eps_list:
            best = None
            for delta in sorted(deltas):
                omega = 0.0
                for tau in taus:
                    for s in (delta, -delta):
                        diff = field_difference(fd.translate(f, tau + s),
                                                fd.translate(f, tau))
                        omega = max(omega, seminorm_td(diff, (-r, r), xv))
                    if omega >= eps:
                        break
                if omega < eps:
                    best = float(delta)
                else:
                    break
            table.append((float(eps), best))
            ok = ok and best is not None
        rows.append(ProbeRow(tuple(xv.tolist()), float(np.max(norms)),
                             bounded, tuple(table), ok))
    return CompactnessReport(float(r), tuple(rows))
