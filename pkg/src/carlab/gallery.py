"""Named builtin fields for the CLI and tests, plus a seeded random
descriptor generator used by the audit experiments.
"""

from __future__ import annotations

import numpy as np

from . import field as fd
from .field import Callback, FieldDescriptor, register_callback
from .profiles import (PiecewiseScalar, SharpeningWave, SharpeningWaveIntegral,
                       SquareWave, TriangleWave)

_SIN = register_callback(Callback(
    name="sin-times-x",
    fn=lambda t, x: np.array([np.sin(t) * x[0]]),
    vector_fn=lambda ts, xs: (np.sin(ts) * xs[:, 0])[:, None],
    m_bound_fn=lambda ts, j: j * np.abs(np.sin(ts)),
    l_bound_fn=lambda ts, j: np.abs(np.sin(ts)),
))

_SIN_JAC = register_callback(Callback(
    name="sin-times-x-jac",
    fn=lambda t, x: np.array([np.sin(t)]),
    vector_fn=lambda ts, xs: np.sin(ts)[:, None],
    m_bound_fn=lambda ts, j: np.abs(np.sin(ts)),
))

_T_X = register_callback(Callback(
    name="t-times-x",
    fn=lambda t, x: np.array([t * x[0]]),
    vector_fn=lambda ts, xs: (ts * xs[:, 0])[:, None],
    m_bound_fn=lambda ts, j: j * np.abs(ts),
    l_bound_fn=lambda ts, j: np.abs(ts),
))

_X_SQ = register_callback(Callback(
    name="x-squared",
    fn=lambda t, x: np.array([x[0] ** 2]),
    vector_fn=lambda ts, xs: (xs[:, 0] ** 2)[:, None],
    m_bound_fn=lambda ts, j: np.full(len(ts), j * j),
    l_bound_fn=lambda ts, j: np.full(len(ts), 2.0 * j),
))


def sin_times_x(p: float = 1.0) -> FieldDescriptor:
    """f(t, x) = sin(t) x: smooth, periodic in t, linear in x."""
    jac = FieldDescriptor(_SIN_JAC, 1, p, fd.SC)
    return FieldDescriptor(_SIN, 1, p, fd.LC, jacobian=jac)


def t_times_x(p: float = 1.0) -> FieldDescriptor:
    """f(t, x) = t x: Lipschitz in t but with unbounded translates."""
    return FieldDescriptor(_T_X, 1, p, fd.LC)


def x_squared(p: float = 1.0) -> FieldDescriptor:
    """f(t, x) = x^2: autonomous field with finite-time blow-up."""
    jac = FieldDescriptor(fd.LinearInX(((2.0,),)), 1, p, fd.SC)
    return FieldDescriptor(_X_SQ, 1, p, fd.LC, jacobian=jac)


def builtin_fields(p: float = 1.0) -> dict[str, FieldDescriptor]:
    wave_f, wave_big_f, wave_g, wave_big_g = fd.wave_shift_family(p)
    return {
        "zero": fd.constant(0.0, p=p),
        "one": fd.constant(1.0, p=p),
        "linear-1": fd.linear(1.0, p=p),
        "wave-f": wave_f,
        "wave-F": wave_big_f,
        "wave-g": wave_g,
        "wave-G": wave_big_g,
        "ramp-wave": fd.sharpening_wave(p),
        "square-wave": fd.square_wave(p),
        "wave-integral": fd.sharpening_wave_integral(p),
        "triangle-wave": fd.triangle_wave(p),
        "sin-x": sin_times_x(p),
        "t-x": t_times_x(p),
        "x-squared": x_squared(p),
    }


def lookup(name: str, p: float = 1.0) -> FieldDescriptor:
    fields = builtin_fields(p)
    if name not in fields:
        raise KeyError(f"unknown builtin field {name!r}; have "
                       f"{sorted(fields)}")
    return fields[name]


# ---------------------------------------------------------------------------
# random descriptors for the audits


def _random_continuous_pw(rng: np.random.Generator) -> PiecewiseScalar:
    n_break = int(rng.integers(3, 6))
    breaks = np.sort(rng.uniform(-3.0, 3.0, size=n_break))
    while np.min(np.diff(breaks)) < 1e-3:
        breaks = np.sort(rng.uniform(-3.0, 3.0, size=n_break))
    values = rng.uniform(-2.0, 2.0, size=n_break)
    coeffs = []
    for i in range(n_break - 1):
        length = breaks[i + 1] - breaks[i]
        c2 = rng.uniform(-1.0, 1.0) if rng.random() < 0.5 else 0.0
        c1 = (values[i + 1] - values[i]) / length - c2 * length
        coeffs.append((values[i], c1, c2))
    return PiecewiseScalar(breaks, coeffs, "hold", "hold")


def random_field(rng: np.random.Generator, p: float = 1.0) -> FieldDescriptor:
    """Random scalar LC descriptor built from exactly integrable parts."""
    continuous = [SharpeningWave(), SharpeningWaveIntegral(), TriangleWave()]
    n_terms = int(rng.integers(1, 4))
    terms = []
    for _ in range(n_terms):
        kind = rng.random()
        if kind < 0.25:  # time-only, discontinuity allowed
            profile = SquareWave() if rng.random() < 0.4 \
                else _random_continuous_pw(rng)
            node = fd.TimeFn(profile)
        elif kind < 0.8:
            profile = continuous[int(rng.integers(0, len(continuous)))] \
                if rng.random() < 0.5 else _random_continuous_pw(rng)
            a = float(rng.choice([-0.5, -1.0 / 3.0, 1.0 / 3.0, 0.5, 1.0]))
            node = fd.ShiftCompose(profile, a)
        elif kind < 0.9:
            node = fd.LinearInX(((float(rng.uniform(-1.5, 1.5)),),))
        else:
            node = fd.Constant((float(rng.uniform(-2.0, 2.0)),))
        weight = float(rng.uniform(0.3, 1.5) * rng.choice([-1.0, 1.0]))
        if rng.random() < 0.3:
            node = fd.Translate(float(rng.uniform(-2.0, 2.0)), node)
        terms.append(fd.ScalarScale(weight, node))
    node = terms[0] if len(terms) == 1 else fd.Sum(tuple(terms))
    return FieldDescriptor(node, 1, p, fd.LC)
