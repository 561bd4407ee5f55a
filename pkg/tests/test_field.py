import numpy as np
import pytest

from carlab import field as fd
from carlab.bounds import optimal_l_bound
from carlab.gallery import sin_times_x, x_squared
from carlab.profiles import SharpeningWave, SharpeningWaveIntegral


def val(f, t, x):
    return float(fd.evaluate(f, t, x)[0])


def test_wave_field_pinned_points():
    wave = fd.sharpening_wave()
    assert val(wave, 1.0, 0.0) == 1.0
    assert val(wave, 2.0, 0.0) == 0.0
    assert val(wave, 3.0, 0.0) == -1.0
    assert val(fd.constant(0.0), 17.3, 0.42) == 0.0
    smooth = fd.sharpening_wave_integral()
    assert val(smooth, 2.0, 0.0) == 1.0
    assert val(smooth, 4.0, 0.0) == 0.0


def test_translate_identity_and_group_law(wave_family):
    f = wave_family[0]
    assert fd.translate(f, 0.0) is f
    a = fd.translate(fd.translate(f, 0.7), -2.3)
    b = fd.translate(f, 0.7 + -2.3)
    assert a.node == b.node
    assert a.jacobian.node == b.jacobian.node


def test_translate_equivariance_random_points(rng, wave_family):
    f = wave_family[0]
    tau = 1.25
    shifted = fd.translate(f, tau)
    ss = rng.uniform(-10, 30, size=10_000)
    xs = rng.uniform(-4, 4, size=(10_000, 1))
    lhs = fd.evaluate_many(shifted, ss, xs)
    rhs = fd.evaluate_many(f, ss + tau, xs)
    assert np.array_equal(lhs, rhs)


def test_translates_approach_square_wave_pointwise():
    wave = fd.sharpening_wave()
    square = fd.square_wave()
    ts = np.array([0.3, 1.1, 2.7, 3.9, -1.4])  # away from the jump set
    sup_gap = []
    for k in (1, 5, 25):
        shifted = fd.translate(wave, 4.0 * k)
        gap = max(abs(val(shifted, t, 0.0) - val(square, t, 0.0)) for t in ts)
        sup_gap.append(gap)
    assert sup_gap[0] > sup_gap[1] > sup_gap[2]
    assert sup_gap[2] < 2e-2


def test_wave_shift_family_contract(wave_family):
    f, big_f, g, big_g = wave_family
    assert val(f, 0.0, 0.0) == 0.0
    assert f.class_claim == fd.LC
    assert big_f.class_claim == fd.SC
    assert big_g.class_claim == fd.THETA_C
    assert f.jacobian is big_f
    ts = np.linspace(-5.0, 45.0, 301)
    xs = np.linspace(-3.0, 3.0, 41)
    grid_t = np.repeat(ts, len(xs))
    grid_x = np.tile(xs, len(ts))[:, None]
    vals = fd.evaluate_many(f, grid_t, grid_x)[:, 0]
    assert np.max(np.abs(vals)) <= 2.0


def test_wave_field_lipschitz_third(rng, wave_family):
    # Lipschitz constant of the profile is 1, the shift coefficient is 1/3
    f = wave_family[0]
    for _ in range(2000):
        t = rng.uniform(-5, 30)
        x1, x2 = rng.uniform(-3, 3, size=2)
        if x1 == x2:
            continue
        quot = abs(val(f, t, x1) - val(f, t, x2)) / abs(x1 - x2)
        assert quot <= 1.0 / 3.0 + 1e-12


def test_jacobian_rules(wave_family):
    assert fd.jacobian_field(fd.linear(2.0)).node == fd.Constant((2.0,))
    f, big_f, _, _ = wave_family
    assert fd.jacobian_field(f) is big_f
    # derived Jacobian of the bare shift-composed tree matches the declared one
    bare = fd.FieldDescriptor(f.node, 1, 1.0, fd.LC)
    assert fd.jacobian_field(bare).node == big_f.node
    s = fd.field_sum(fd.linear(2.0), fd.linear(-0.5))
    jac = fd.jacobian_field(fd.FieldDescriptor(s.node, 1, 1.0, fd.LC))
    assert jac.node == fd.Sum((fd.Constant((2.0,)), fd.Constant((-0.5,))))


def test_jacobian_unsupported_without_declaration():
    cb = fd.Callback("opaque-test", lambda t, x: np.array([t * x[0] ** 3]))
    f = fd.FieldDescriptor(cb, 1, 1.0, fd.LC)
    with pytest.raises(fd.UnsupportedOperationError):
        fd.jacobian_field(f)


def test_dimension_mismatch_errors(wave_family):
    f = wave_family[0]
    with pytest.raises(fd.DimensionMismatchError):
        fd.evaluate(f, 0.0, np.array([1.0, 2.0]))
    with pytest.raises(fd.DimensionMismatchError):
        fd.field_sum(f, fd.constant(np.zeros(2), dim_in=2))


def test_operator_norm_against_svd(rng):
    for shape in [(1, 1), (2, 2), (2, 1), (3, 3), (4, 4)]:
        for _ in range(20):
            m = rng.normal(size=shape)
            assert fd.operator_norm(m) == pytest.approx(
                np.linalg.norm(m, 2), rel=1e-10)


def test_batch_norms_shapes(rng):
    vecs = rng.normal(size=(7, 3))
    assert np.allclose(fd.batch_norms(vecs), np.linalg.norm(vecs, axis=1))
    mats = rng.normal(size=(5, 2, 2))
    assert np.allclose(fd.batch_norms(mats),
                       [np.linalg.norm(m, 2) for m in mats], rtol=1e-10)


def test_matrix_assemble_evaluation():
    node = fd.MatrixAssemble(((fd.Constant((1.0,)), fd.LinearInX(((2.0,),))),
                              (fd.TimeFn(SharpeningWave()), fd.Constant((0.0,)))))
    f = fd.FieldDescriptor(node, 1, 1.0, fd.SC)
    out = fd.evaluate(f, 1.0, 0.5)
    assert out.shape == (2, 2)
    assert out[0, 1] == 1.0       # 2 * 0.5
    assert out[1, 0] == 1.0       # wave at t=1


def test_lc_claim_audit_against_l_bound(rng, wave_family):
    # sampled difference quotients never exceed the reported optimal l-bound
    cases = [wave_family[0], fd.linear(1.5), sin_times_x(), x_squared()]
    for f in cases:
        lb = optimal_l_bound(f, 2.0, (0.0, 3.0), t_samples=31)
        for t, bound in zip(lb.grid, lb.values):
            xs = rng.uniform(-2, 2, size=12)
            for x1, x2 in zip(xs[:-1], xs[1:]):
                if x1 == x2:
                    continue
                quot = abs(val(f, t, x1) - val(f, t, x2)) / abs(x1 - x2)
                assert quot <= bound + 1e-9


def test_evaluate_rejects_nonfinite_time(wave_family):
    with pytest.raises(ValueError):
        fd.evaluate(wave_family[0], np.inf, 0.0)


def test_callback_registry_roundtrip():
    assert fd.CALLBACK_REGISTRY["sin-times-x"] is sin_times_x().node
