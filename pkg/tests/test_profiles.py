import numpy as np
import pytest

from carlab.profiles import (PiecewiseScalar, PolyProfile, SharpeningWave,
                             SharpeningWaveIntegral, SquareWave, TriangleWave)

EPS = np.finfo(float).eps

ALL_PROFILES = [PolyProfile(0.5, -1.0, 0.25),
                PiecewiseScalar([-1.0, 0.0, 2.0],
                                [(1.0, -2.0, 0.5), (0.0, 1.0, -0.25)],
                                "hold", "zero"),
                SharpeningWave(), SquareWave(), SharpeningWaveIntegral(),
                TriangleWave()]


def composite_simpson(fn, a, b, n=2000):
    xs = np.linspace(a, b, 2 * n + 1)
    ys = fn(xs)
    h = (b - a) / (2 * n)
    return h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum())


@pytest.mark.parametrize("profile", ALL_PROFILES)
def test_closed_form_integral_matches_simpson(profile):
    # Simpson is exact for degree <= 2, so only rounding separates the routes
    for a, b in [(-2.0, 3.0), (0.0, 7.5), (-5.0, -0.5)]:
        cuts = [a] + [c for c in profile.breakpoints_in(a, b)] + [b]
        total = sum(composite_simpson(profile, lo, hi, 64)
                    for lo, hi in zip(cuts[:-1], cuts[1:]))
        assert abs(profile.integral(a, b) - total) <= 200 * EPS * (b - a + 1)


@pytest.mark.parametrize("profile", ALL_PROFILES)
def test_max_abs_dominates_dense_samples(profile):
    for a, b in [(-1.5, 2.5), (3.0, 9.0)]:
        bound = profile.max_abs_on(a, b)
        xs = np.linspace(a, b, 20001)
        assert np.max(np.abs(profile(xs))) <= bound + 1e-12


def test_wave_pinned_values():
    wave = SharpeningWave()
    assert wave(1.0) == 1.0
    assert wave(2.0) == 0.0
    assert wave(3.0) == -1.0
    assert wave(-0.5) == 0.0
    # second period ramps have slope 2
    assert wave(4.25) == pytest.approx(0.5)
    assert wave(4.5) == 1.0


def test_wave_integral_pinned_values():
    integral = SharpeningWaveIntegral()
    assert integral(2.0) == 1.0
    assert integral(4.0) == 0.0
    for n in range(6):
        assert integral(4.0 * n) == 0.0
    # running-integral identity against the closed-form pieces
    wave = SharpeningWave()
    for t in np.linspace(-1.0, 14.0, 61):
        assert integral(t) == pytest.approx(wave.integral(0.0, t), abs=1e-12)


def test_square_wave_jumps_exactly_at_even_integers():
    square = SquareWave()
    for n in range(-3, 4):
        t = 2.0 * n
        left = square(t - 1e-9)
        right = square(t + 1e-9)
        assert left == -right
        assert square(t) == right  # right-limit convention
    marks = square.breakpoints_in(-6.0, 6.0)
    assert np.allclose(marks, np.arange(-4.0, 6.0, 2.0))


def test_triangle_wave_matches_square_integral():
    triangle = TriangleWave()
    square = SquareWave()
    for n in range(6):
        assert triangle(4.0 * n) == 0.0
    for t in np.linspace(-6.0, 10.0, 41):
        assert triangle(t) == pytest.approx(square.integral(0.0, t), abs=1e-12)


def test_abs_integral_splits_at_roots():
    poly = PolyProfile(-1.0, 0.0, 1.0)  # roots at +-1
    assert poly.abs_integral(-2.0, 2.0) == pytest.approx(4.0, abs=1e-12)
    square = SquareWave()
    assert square.abs_integral(0.0, 4.0) == pytest.approx(4.0, abs=1e-12)


def test_derivative_relations_by_finite_differences():
    pairs = [(SharpeningWaveIntegral(), SharpeningWave()),
             (TriangleWave(), SquareWave())]
    h = 1e-7
    for fn, dfn in pairs:
        assert fn.derivative() == dfn
        for t in [0.3, 1.7, 5.2, 9.9]:  # away from corners
            fd_slope = (fn(t + h) - fn(t - h)) / (2 * h)
            assert fd_slope == pytest.approx(dfn(t), abs=1e-5)


def test_max_slope_on_continuous_profiles():
    assert SharpeningWaveIntegral().max_slope_on(0.0, 4.0) == 1.0
    assert TriangleWave().max_slope_on(-3.0, 11.0) == 1.0
    assert SharpeningWave().max_slope_on(4.0, 8.0) == 2.0
    assert SquareWave().max_slope_on(0.0, 1.0) is None


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewiseScalar([1.0, 0.0], [(0.0, 0.0, 0.0)])
    with pytest.raises(ValueError):
        PiecewiseScalar([0.0, 1.0], [])
    with pytest.raises(ValueError):
        PiecewiseScalar([0.0, 1.0], [(0.0, 0.0, 0.0)], left_tail="wrap")


def test_piecewise_tails():
    pw = PiecewiseScalar([0.0, 1.0], [(2.0, 1.0, 0.0)], "hold", "zero")
    assert pw(-5.0) == 2.0     # held left boundary value
    assert pw(0.5) == 2.5
    assert pw(3.0) == 0.0      # zero right tail
    assert pw(1.0) == 0.0      # right limit at the last breakpoint
