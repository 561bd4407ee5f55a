"""Config-driven experiment runner.

Every experiment is described by a JSON config (validated against a strict
schema: unknown keys are rejected) and writes CSV artifacts plus a
``summary.txt`` with one PASS/FAIL line per verdict.  The exit code is zero
exactly when every verdict passes.  All randomness flows from the config
seed, and outputs carry no timestamps, so identical configs give
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import field as fd
from . import gallery
from . import topology as topo
from .serialize import DescriptorSyntaxError, parse_descriptor
from .skewflow import (cocycle_defect_phi1, linearized_check)
from .solver import COMPLETE, StepPolicy, integrate, integrate_triangular, \
    solver_tolerance

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# config plumbing


def _check_keys(section: dict, allowed: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")


def resolve_field(ref, p: float = 1.0) -> fd.FieldDescriptor:
    """Field reference: 'gallery:NAME', bare gallery name, '@file', or s-expr."""
    if not isinstance(ref, str):
        raise ConfigError(f"field reference must be a string, got {ref!r}")
    if ref.startswith("gallery:"):
        return gallery.lookup(ref.split(":", 1)[1], p)
    if ref.startswith("@"):
        text = Path(ref[1:]).read_text()
        return parse_descriptor(text)
    if ref.lstrip().startswith("("):
        return parse_descriptor(ref)
    return gallery.lookup(ref, p)


def _policy_from(params: dict) -> StepPolicy:
    return StepPolicy(dt=params.get("dt", 1e-3),
                      subsamples=params.get("subsamples", 4),
                      scheme=params.get("scheme", "averaged_heun"),
                      r_max=params.get("rmax", 1e6))

_POLICY_KEYS = {"dt", "subsamples", "scheme", "rmax"}


def _interval(params: dict, key: str = "interval", default=(0.0, 4.0)):
    pair = params.get(key, list(default))
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ConfigError(f"{key} must be a two-element list")
    return float(pair[0]), float(pair[1])


def _write_rows(path: Path, header, rows, footer: str | None = None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])
        if footer:
            fh.write(footer + "\n")


# ---------------------------------------------------------------------------
# experiments


def _exp_seminorm(params, out, seed, jobs):
    _check_keys(params, {"field", "kind", "interval", "j", "x", "p",
                         "resolution", "theta_slope", "method"}, "seminorm")
    f = resolve_field(params["field"], params.get("p", 1.0))
    kind = params.get("kind", "td")
    interval = _interval(params)
    heuristic = False
    if kind == "td":
        value = topo.seminorm_td(f, interval, params.get("x", 0.0))
    elif kind == "tb":
        value = topo.seminorm_tb(f, interval, int(params.get("j", 1)))
    elif kind == "ttheta":
        theta = bnd.uniform_theta(params.get("theta_slope", 2.0),
                                  s_max=2.0 * abs(interval[1] - interval[0]))
        res = tuple(params.get("resolution", (64, 61)))
        sv = topo.seminorm_ttheta(f, interval, int(params.get("j", 1)), theta,
                                  resolution=res,
                                  method=params.get("method", "auto"),
                                  details=True)
        value, heuristic = sv.value, sv.heuristic
    else:
        raise ConfigError(f"unknown seminorm kind {kind!r}")
    _write_rows(out / "seminorm.csv", ["kind", "lo", "hi", "value", "heuristic"],
                [[kind, interval[0], interval[1], float(value),
                  str(heuristic).lower()]])
    return [Verdict("seminorm", True, f"{kind} value {value!r}")]


def _exp_metric(params, out, seed, jobs):
    _check_keys(params, {"field_a", "field_b", "kind", "n_max", "j_max",
                         "d_count", "p"}, "metric")
    p = params.get("p", 1.0)
    cfg = topo.MetricConfig(n_max=int(params.get("n_max", 4)),
                            j_max=int(params.get("j_max", 4)),
                            d_count=int(params.get("d_count", 4)))
    value = topo.metric(resolve_field(params["field_a"], p),
                        resolve_field(params["field_b"], p),
                        cfg, params.get("kind", "td"))
    _write_rows(out / "metric.csv", ["kind", "value"],
                [[params.get("kind", "td"), float(value)]])
    return [Verdict("metric", True, f"distance {value!r}")]


def _exp_converge(params, out, seed, jobs):
    _check_keys(params, {"field", "limit", "kind", "taus", "ratio_below",
                         "n_max", "j_max", "d_count", "p"}, "converge")
    p = params.get("p", 1.0)
    base = resolve_field(params["field"], p)
    limit = resolve_field(params["limit"], p)
    taus = [float(t) for t in params.get("taus", [4 * k for k in range(1, 9)])]
    cfg = topo.MetricConfig(n_max=int(params.get("n_max", 2)),
                            j_max=int(params.get("j_max", 2)),
                            d_count=int(params.get("d_count", 3)))
    kind = params.get("kind", "td")
    seq = topo.hull_sample(base, taus)
    dists = _pmap(lambda h: topo.metric(h, limit, cfg, kind), seq, jobs)
    table = topo.DecayTable(tuple(taus), tuple(dists))
    bound = float(params.get("ratio_below", 1.0))
    ok = table.ratio < bound
    table.to_csv(out / "converge.csv", "PASS" if ok else "FAIL")
    return [Verdict("converge", ok,
                    f"{kind} ratio {table.ratio!r} (bound {bound})")]


def _exp_bounds(params, out, seed, jobs):
    _check_keys(params, {"field", "j", "window", "which", "t_samples",
                         "x_density", "p"}, "bounds")
    f = resolve_field(params["field"], params.get("p", 1.0))
    j = float(params.get("j", 1))
    window = _interval(params, "window")
    t_samples = int(params.get("t_samples", 513))
    which = params.get("which", "both")
    verdicts = []
    if which in ("m", "both"):
        mb = bnd.optimal_m_bound(f, j, window, t_samples,
                                 int(params.get("x_density", 64)))
        mb.to_csv(out / "mbound.csv", j=j, interval=window)
        verdicts.append(Verdict("m-bound", True,
                                f"sup {float(np.max(mb.values))!r}"))
    if which in ("l", "both"):
        lb = bnd.optimal_l_bound(f, j, window, t_samples)
        lb.to_csv(out / "lbound.csv", j=j, interval=window)
        verdicts.append(Verdict("l-bound", True,
                                f"sup {float(np.max(lb.values))!r}"))
    return verdicts


def _exp_equicont(params, out, seed, jobs):
    _check_keys(params, {"fields", "j", "r", "eps_list", "t_samples",
                         "expect_fail", "p"}, "equicont")
    r = float(params.get("r", 1.0))
    j = float(params.get("j", 1))
    fields = [resolve_field(ref, params.get("p", 1.0))
              for ref in params["fields"]]
    family = [bnd.optimal_m_bound(f, j, (-r, r),
                                  int(params.get("t_samples", 1025)))
              for f in fields]
    eps_list = [float(e) for e in params.get("eps_list", [0.1, 0.5, 1.0])]
    profile = bnd.equicontinuity_profile(family, r, eps_list)
    profile.to_csv(out / "equicont.csv")
    any_fail = any(d is None for _, d in profile.entries)
    expect_fail = bool(params.get("expect_fail", False))
    ok = any_fail == expect_fail
    return [Verdict("equicont", ok,
                    f"failures {'present' if any_fail else 'absent'}, "
                    f"expected {'present' if expect_fail else 'absent'}")]


def _exp_solve(params, out, seed, jobs):
    _check_keys(params, {"field", "x0", "span", "exit_radius", "p",
                         *_POLICY_KEYS}, "solve")
    f = resolve_field(params["field"], params.get("p", 1.0))
    traj = integrate(f, np.atleast_1d(params.get("x0", 0.0)),
                     _interval(params, "span", (0.0, 1.0)),
                     _policy_from(params),
                     exit_radius=params.get("exit_radius"))
    traj.to_csv(out / "trajectory.csv")
    return [Verdict("solve", True,
                    f"status {traj.status}, final {traj.final_state.tolist()!r}")]


def _exp_triangular(params, out, seed, jobs):
    _check_keys(params, {"field", "jacobian", "inhom", "x0", "y0", "span",
                         "p", *_POLICY_KEYS}, "triangular")
    p = params.get("p", 1.0)
    f = resolve_field(params["field"], p)
    jac = resolve_field(params["jacobian"], p) if "jacobian" in params \
        else fd.jacobian_field(f)
    inhom = resolve_field(params["inhom"], p) if "inhom" in params \
        else fd.constant(np.zeros(f.dim_in), dim_in=f.dim_in, p=p)
    traj = integrate_triangular(f, jac, inhom,
                                np.atleast_1d(params.get("x0", 0.0)),
                                np.atleast_1d(params.get("y0", 1.0)),
                                _interval(params, "span", (0.0, 1.0)),
                                _policy_from(params))
    traj.to_csv(out / "trajectory.csv")
    return [Verdict("triangular", True, f"status {traj.status}")]


def _exp_flow(params, out, seed, jobs):
    _check_keys(params, {"field", "x0", "grid", "p", *_POLICY_KEYS}, "flow")
    f = resolve_field(params["field"], params.get("p", 1.0))
    policy = _policy_from(params)
    x0 = np.atleast_1d(params.get("x0", 0.0))
    grid = [float(v) for v in params.get("grid", [0.5, 1.0])]
    tol = solver_tolerance(f, x0, (0.0, 2.0 * max(grid)), policy)
    rows, worst = [], 0.0
    for t in grid:
        for s in grid:
            defect = cocycle_defect_phi1(f, x0, t, s, policy)
            worst = max(worst, defect)
            rows.append([t, s, defect])
    ok = worst <= 2.0 * tol
    _write_rows(out / "cocycle.csv", ["t", "s", "defect"], rows,
                footer=f"# tolerance: {tol!r}")
    return [Verdict("flow-cocycle", ok,
                    f"worst defect {worst!r} vs 2x tol {2 * tol!r}")]


def _exp_linearize(params, out, seed, jobs):
    _check_keys(params, {"field", "x0", "y0", "span", "ladder", "slope_min",
                         "p", *_POLICY_KEYS}, "linearize")
    f = resolve_field(params["field"], params.get("p", 1.0))
    ladder = tuple(params.get("ladder", (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)))
    rep = linearized_check(f, np.atleast_1d(params.get("x0", 0.0)),
                           np.atleast_1d(params.get("y0", 1.0)),
                           _interval(params, "span", (0.0, 2.0)),
                           eps_ladder=ladder, policy=_policy_from(params),
                           slope_threshold=float(params.get("slope_min", 0.9)))
    rep.to_csv(out / "linearize.csv")
    return [Verdict("linearize", rep.passed, f"slope {rep.slope!r}")]


def _exp_hull(params, out, seed, jobs):
    _check_keys(params, {"field", "taus", "kind", "eps", "n_max", "j_max",
                         "d_count", "p"}, "hull")
    f = resolve_field(params["field"], params.get("p", 1.0))
    taus = [float(t) for t in params.get("taus", [4.0 * k for k in range(11)])]
    cfg = topo.MetricConfig(n_max=int(params.get("n_max", 2)),
                            j_max=int(params.get("j_max", 2)),
                            d_count=int(params.get("d_count", 3)))
    kind = params.get("kind", "td")
    eps = float(params.get("eps", 0.05))
    points = topo.hull_sample(f, taus)
    n = len(points)
    dmat = np.zeros((n, n))
    pairs = [(i, k) for i in range(n) for k in range(i + 1, n)]
    vals = _pmap(lambda ik: topo.metric(points[ik[0]], points[ik[1]], cfg, kind),
                 pairs, jobs)
    for (i, k), v in zip(pairs, vals):
        dmat[i, k] = dmat[k, i] = v
    net, cover = topo.eps_net(points, cfg, kind, eps, distances=dmat)
    half_net, _ = topo.eps_net(points[: (3 * n) // 4], cfg, kind, eps,
                               distances=dmat[: (3 * n) // 4, : (3 * n) // 4])
    _write_rows(out / "hull_net.csv", ["member_index", "tau"],
                [[i, taus[i]] for i in net],
                footer=f"# coverage: {cover!r}\n# prefix_net_size: "
                       f"{len(half_net)}")
    stable = len(net) <= len(half_net) + 1
    return [Verdict("hull-net", cover <= eps and stable,
                    f"net size {len(net)} (prefix {len(half_net)}), "
                    f"coverage {cover!r}")]


def _exp_ordering_audit(params, out, seed, jobs):
    _check_keys(params, {"count", "interval", "j", "resolution", "x"},
                "ordering-audit")
    rng = np.random.default_rng(seed)
    count = int(params.get("count", 20))
    interval = _interval(params, "interval", (0.0, 2.0))
    j = int(params.get("j", 2))
    res = tuple(params.get("resolution", (32, 65)))
    x_pt = float(params.get("x", 0.0))
    theta = bnd.uniform_theta(2.0, s_max=2.0 * (interval[1] - interval[0]))
    rows, ok_all = [], True
    for idx in range(count):
        f = gallery.random_field(rng)
        td = topo.seminorm_td(f, interval, x_pt)
        tt = topo.seminorm_ttheta(f, interval, j, theta, resolution=res,
                                  method="auto")
        tb = topo.seminorm_tb(f, interval, j)
        ok = td <= tt + 1e-9 and tt <= tb * 1.02 + 1e-9
        ok_all = ok_all and ok
        rows.append([idx, td, tt, tb, "PASS" if ok else "FAIL"])
    _write_rows(out / "ordering.csv", ["field", "td", "ttheta", "tb", "chain"],
                rows)
    return [Verdict("ordering-chain", ok_all, f"{count} random fields")]


def _exp_hull_compactness(params, out, seed, jobs):
    _check_keys(params, {"cases"}, "hull-compactness")
    default_cases = [
        {"field": "sin-x", "expect": "pass"},
        {"field": "wave-f", "expect": "pass"},
        {"field": "t-x", "expect": "fail"},
    ]
    verdicts = []
    for case in params.get("cases", default_cases):
        _check_keys(case, {"field", "probes", "r", "eps_list", "expect"},
                    "hull-compactness case")
        name = case["field"]
        rep = topo.hull_compactness_test(
            resolve_field(name),
            case.get("probes", [0.0, 1.0, -1.0]),
            float(case.get("r", 4.0)),
            [float(e) for e in case.get("eps_list", [0.5, 1.0])])
        rep.to_csv(out / f"compactness_{name.replace(':', '_')}.csv")
        expect_pass = case.get("expect", "pass") == "pass"
        ok = rep.passed == expect_pass
        verdicts.append(Verdict(f"compactness[{name}]", ok,
                                f"{'PASS' if rep.passed else 'FAIL'} expected "
                                f"{'PASS' if expect_pass else 'FAIL'}"))
    return verdicts


def _exp_example6(params, out, seed, jobs):
    _check_keys(params, {"k_base", "k_metric", "k_ttheta", "resolution"},
                "example6-full")
    f, big_f, g, big_g = fd.wave_shift_family()
    verdicts = []

    # stage 1: exact base distances of the translated wave to its limit
    k_base = int(params.get("k_base", 20))
    wave = fd.sharpening_wave()
    square = fd.square_wave()
    dists = [topo.seminorm_td(
        fd.field_difference(fd.translate(wave, 4.0 * k), square),
        (-4.0, 4.0), 0.0) for k in range(1, k_base + 1)]
    _write_rows(out / "base_distances.csv", ["k", "distance"],
                [[k + 1, d] for k, d in enumerate(dists)])
    dec = all(b < a for a, b in zip(dists, dists[1:]))
    ok1 = dec and dists[-1] < dists[0] / 4.0
    verdicts.append(Verdict("base-convergence", ok1,
                            f"d1 {dists[0]!r} d{k_base} {dists[-1]!r}"))

    # stage 2: translate family approaches the limit field in the
    # fixed-point metric
    k_metric = int(params.get("k_metric", 8))
    cfg = topo.MetricConfig(n_max=2, j_max=2, d_count=3)
    taus = [4.0 * k for k in range(1, k_metric + 1)]
    seq = topo.hull_sample(f, taus)
    dists2 = _pmap(lambda h: topo.metric(h, g, cfg, "td"), seq, jobs)
    table = topo.DecayTable(tuple(range(1, k_metric + 1)), tuple(dists2))
    ok2 = table.ratio < 1.0 and table.fraction_decreasing >= 0.75
    table.to_csv(out / "td_decay.csv", "PASS" if ok2 else "FAIL")
    verdicts.append(Verdict("pointwise-metric-decay", ok2,
                            f"ratio {table.ratio!r}"))

    # stage 3: Jacobian translates approach their limit in the
    # modulus-constrained seminorm (the headline convergence)
    k_tt = int(params.get("k_ttheta", 10))
    res = tuple(params.get("resolution", (64, 61)))
    theta = bnd.uniform_theta(2.0, s_max=8.0)

    def tt_distance(k):
        diff = fd.field_difference(fd.translate(big_f, 4.0 * k), big_g)
        return topo.seminorm_ttheta(diff, (0.0, 4.0), 3, theta,
                                    resolution=res, method="exact")

    dists3 = _pmap(tt_distance, list(range(1, k_tt + 1)), jobs)
    table3 = topo.DecayTable(tuple(range(1, k_tt + 1)), tuple(dists3))
    ok3 = table3.ratio < 0.5 and \
        all(b <= a + 1e-12 for a, b in zip(dists3, dists3[1:]))
    table3.to_csv(out / "ttheta_decay.csv", "PASS" if ok3 else "FAIL")
    verdicts.append(Verdict("curve-seminorm-decay", ok3,
                            f"ratio {table3.ratio!r}"))

    # stage 4: variational fiber matches finite differences
    rep = linearized_check(f, 0.0, 1.0, (0.0, 2.0),
                           policy=StepPolicy(dt=1e-3))
    rep.to_csv(out / "linearize.csv")
    ok4 = rep.passed and rep.errors[-1] < rep.errors[0] / 30.0
    verdicts.append(Verdict("linearization", ok4, f"slope {rep.slope!r}"))
    return verdicts


EXPERIMENTS = {
    "seminorm": _exp_seminorm,
    "metric": _exp_metric,
    "converge": _exp_converge,
    "bounds": _exp_bounds,
    "equicont": _exp_equicont,
    "solve": _exp_solve,
    "triangular": _exp_triangular,
    "flow": _exp_flow,
    "linearize": _exp_linearize,
    "hull": _exp_hull,
    "ordering-audit": _exp_ordering_audit,
    "hull-compactness": _exp_hull_compactness,
    "example6-full": _exp_example6,
}

PRESETS = {
    "example6-full": ("worked-example pipeline: base distances, metric decay, "
                      "curve-seminorm decay, linearization",
                      {"schema_version": SCHEMA_VERSION, "seed": 0,
                       "experiment": "example6-full", "params": {}}),
    "ordering-audit": ("seminorm chain td <= ttheta <= tb on random fields",
                       {"schema_version": SCHEMA_VERSION, "seed": 0,
                        "experiment": "ordering-audit",
                        "params": {"count": 20}}),
    "hull-compactness": ("orbit boundedness/uniform-continuity probes on "
                         "three reference fields",
                         {"schema_version": SCHEMA_VERSION, "seed": 0,
                          "experiment": "hull-compactness", "params": {}}),
}


def list_presets() -> list[tuple[str, str]]:
    return [(name, desc) for name, (desc, _) in sorted(PRESETS.items())]


# ---------------------------------------------------------------------------
# runner


def run_config(config: dict, out_dir, jobs: int = 1) -> int:
    _check_keys(config, {"schema_version", "seed", "experiment", "params"},
                "config")
    version = config.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, "
                          f"got {version!r}")
    name = config.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; available: "
                          f"{sorted(EXPERIMENTS)}")
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    seed = int(config.get("seed", 0))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    verdicts = EXPERIMENTS[name](params, out, seed, jobs)
    lines = [f"{'PASS' if v.passed else 'FAIL'} {v.name} -- {v.detail}"
             for v in verdicts]
    ok = all(v.passed for v in verdicts)
    lines.append(f"{'PASS' if ok else 'FAIL'} overall")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0 if ok else 1


def run(config_path, out_dir=None, jobs: int = 1) -> int:
    """Validate and execute the experiment described by a JSON config file."""
    path = Path(config_path)
    try:
        config = json.loads(path.read_text())
    except FileNotFoundError:
        print(f"error: config {config_path} not found", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: {path}:{exc.lineno}:{exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 2
    try:
        return run_config(config, out_dir or path.with_suffix("") .name + "-out",
                          jobs)
    except (ConfigError, DescriptorSyntaxError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub):
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker threads for independent computations")
    sub.add_argument("--seed", type=int, default=0)


def _config_from_cli(experiment: str, params: dict, seed: int) -> dict:
    params = {k: v for k, v in params.items() if v is not None}
    return {"schema_version": SCHEMA_VERSION, "seed": seed,
            "experiment": experiment, "params": params}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="carlab",
        description="numerical laboratory for Caratheodory vector fields")
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="execute a JSON experiment config")
    run_p.add_argument("config")
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--jobs", type=int, default=1)

    pre = subs.add_parser("preset", help="run or list built-in experiments")
    pre.add_argument("name", nargs="?", default=None)
    pre.add_argument("--list", action="store_true")
    pre.add_argument("--out", default=None)
    pre.add_argument("--jobs", type=int, default=1)

    def simple(name, help_, args):
        sub = subs.add_parser(name, help=help_)
        for flag, kw in args:
            sub.add_argument(flag, **kw)
        _add_common(sub)
        return sub

    two = {"nargs": 2, "type": float}
    simple("seminorm", "evaluate one seminorm", [
        ("--field", {"required": True}), ("--kind", {"default": "td"}),
        ("--interval", two), ("--j", {"type": int}), ("--x", {"type": float}),
        ("--resolution", {"nargs": 2, "type": int}),
        ("--theta-slope", {"type": float, "dest": "theta_slope"}),
        ("--method", {})])
    simple("metric", "distance between two fields", [
        ("--field-a", {"required": True, "dest": "field_a"}),
        ("--field-b", {"required": True, "dest": "field_b"}),
        ("--kind", {"default": "td"}), ("--n-max", {"type": int,
                                                    "dest": "n_max"}),
        ("--j-max", {"type": int, "dest": "j_max"}),
        ("--d-count", {"type": int, "dest": "d_count"})])
    simple("converge", "translate-family decay toward a limit", [
        ("--field", {"required": True}), ("--limit", {"required": True}),
        ("--kind", {"default": "td"}),
        ("--taus", {"nargs": "+", "type": float}),
        ("--ratio-below", {"type": float, "dest": "ratio_below"})])
    simple("bounds", "optimal m- and l-bounds", [
        ("--field", {"required": True}), ("--j", {"type": float}),
        ("--window", two), ("--which", {"default": "both"}),
        ("--t-samples", {"type": int, "dest": "t_samples"}),
        ("--x-density", {"type": int, "dest": "x_density"})])
    simple("equicont", "family equicontinuity profile", [
        ("--fields", {"nargs": "+", "required": True}),
        ("--j", {"type": float}), ("--r", {"type": float}),
        ("--eps-list", {"nargs": "+", "type": float, "dest": "eps_list"}),
        ("--expect-fail", {"action": "store_true", "dest": "expect_fail"})])
    simple("solve", "integrate an initial value problem", [
        ("--field", {"required": True}), ("--x0", {"type": float}),
        ("--span", two), ("--dt", {"type": float}), ("--scheme", {}),
        ("--subsamples", {"type": int}), ("--rmax", {"type": float}),
        ("--exit-radius", {"type": float, "dest": "exit_radius"})])
    simple("triangular", "integrate the triangular system", [
        ("--field", {"required": True}), ("--jacobian", {}), ("--inhom", {}),
        ("--x0", {"type": float}), ("--y0", {"type": float}), ("--span", two),
        ("--dt", {"type": float}), ("--scheme", {}),
        ("--subsamples", {"type": int}), ("--rmax", {"type": float})])
    simple("flow", "cocycle audit of the skew-product flow", [
        ("--field", {"required": True}), ("--x0", {"type": float}),
        ("--grid", {"nargs": "+", "type": float}), ("--dt", {"type": float})])
    simple("linearize", "finite-difference check of the variational fiber", [
        ("--field", {"required": True}), ("--x0", {"type": float}),
        ("--y0", {"type": float}), ("--span", two),
        ("--ladder", {"nargs": "+", "type": float}),
        ("--slope-min", {"type": float, "dest": "slope_min"}),
        ("--dt", {"type": float})])
    simple("hull", "translate sampling and greedy epsilon net", [
        ("--field", {"required": True}),
        ("--taus", {"nargs": "+", "type": float}),
        ("--kind", {"default": "td"}), ("--eps", {"type": float})])

    ns = parser.parse_args(argv)
    if ns.command == "run":
        return run(ns.config, ns.out, ns.jobs)
    if ns.command == "preset":
        if ns.list or ns.name is None:
            for name, desc in list_presets():
                print(f"{name}: {desc}")
            return 0
        if ns.name not in PRESETS:
            print(f"error: unknown preset {ns.name!r}", file=sys.stderr)
            return 2
        config = PRESETS[ns.name][1]
        try:
            return run_config(config, ns.out or f"{ns.name}-out", ns.jobs)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    # generic subcommands share the config runner
    reserved = {"command", "out", "jobs", "seed"}
    params = {}
    for key, value in vars(ns).items():
        if key in reserved or value is None or value is False:
            continue
        params[key] = list(value) if isinstance(value, (list, tuple)) else value
    try:
        return run_config(_config_from_cli(ns.command, params, ns.seed),
                          ns.out or f"{ns.command}-out", ns.jobs)
    except (ConfigError, DescriptorSyntaxError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
