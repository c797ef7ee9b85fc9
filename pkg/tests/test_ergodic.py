import math

import numpy as np
import pytest

from apsplit import ergodic
from apsplit.averaging import HorizonSchedule
from apsplit.models import MatrixModel, TranslationModel, apply, indicator
from apsplit.signals import sinusoid


def model(*diag):
    return MatrixModel.from_generator(np.diag(diag))


def test_cesaro_mean_constant_orbit(rng):
    x = rng.normal(size=3)
    for r in (0.5, 3.0, 100.0):
        val, err = ergodic.cesaro_mean(MatrixModel.from_generator(np.zeros((3, 3))), x, r)
        np.testing.assert_allclose(val, x, atol=1e-14)


def test_cesaro_mean_full_period():
    val, err = ergodic.cesaro_mean(model(1j), [1], 2 * math.pi)
    oracle = (np.exp(2j * math.pi) - 1) / (2j * math.pi)
    assert abs(val[0] - oracle) <= max(err, 1e-12)
    assert abs(val[0]) < 1e-10


def test_cesaro_mean_decaying_component():
    val, _ = ergodic.cesaro_mean(model(0, -1), [1, 1], 50.0)
    np.testing.assert_allclose(val, [1, (1 - math.exp(-50)) / 50], atol=1e-6)


def test_cesaro_mean_domain_errors():
    m = model(1j)
    with pytest.raises(ValueError):
        ergodic.cesaro_mean(m, [1], 0.0)
    with pytest.raises(ValueError):
        ergodic.cesaro_mean(m, [1], 1.0, h=1.0)
    with pytest.raises(TypeError):
        ergodic.cesaro_mean(TranslationModel(), sinusoid(), 1.0)


def test_cesaro_mean_weighted_closed_form():
    # (1/r)∫ e^{-iωs} e^{λs} ds = (e^{(λ-iω)r} - 1) / ((λ-iω) r)
    lam, w, r = -0.3 + 2j, 0.7, 13.0
    val, _ = ergodic.cesaro_mean(model(lam), [1], r, omega=w)
    z = lam - 1j * w
    assert abs(val[0] - (np.exp(z * r) - 1) / (z * r)) < 1e-9


def test_mean_ergodic_projection_examples():
    est = ergodic.mean_ergodic_projection(model(0, 1j, -1), [1, 1, 1])
    assert est.converged
    assert np.linalg.norm(est.value - [1, 0, 0]) <= 1e-6
    assert est.diagnostics["generator_residual"] <= 1e-5
    assert est.residuals[-1] <= est.tol
    assert all(a < b for a, b in zip(est.r_history, est.r_history[1:]))
    fixed = ergodic.mean_ergodic_projection(model(0, 1j, -1), [2, 0, 0])
    np.testing.assert_allclose(fixed.value, [2, 0, 0], atol=1e-12)
    none = ergodic.mean_ergodic_projection(model(1j, -1), [1, 1])
    assert np.linalg.norm(none.value) <= 1e-6


def test_projection_inconclusive_on_short_schedule():
    est = ergodic.mean_ergodic_projection(model(0, 1j), [1, 1], HorizonSchedule(16, 3))
    assert not est.converged and est.inconclusive
    assert len(est.residuals) == 3


def test_weighted_mean_examples():
    m = model(0, 1j, -1)
    a = ergodic.weighted_mean(m, [1, 1, 1], 0.0)
    b = ergodic.mean_ergodic_projection(m, [1, 1, 1])
    np.testing.assert_array_equal(a.value, b.value)
    est = ergodic.weighted_mean(model(1j, 2j), [1, 1], 1.0, HorizonSchedule.ending_at(1e5))
    assert est.r_history[-1] == 1e5
    assert np.linalg.norm(est.value - [1, 0]) <= 1e-4
    est = ergodic.weighted_mean(model(-1), [1], 1.0)
    assert est.converged and abs(est.value[0]) <= 1e-6


def test_weighted_mean_gap_error_bound():
    # component at distance g decays like 2/(r g) under uniform averaging
    g = 0.5
    for r in (1e3, 1e4):
        val, _ = ergodic.cesaro_mean(model(1j, 1j * (1 + g)), [1, 1], r, omega=1.0)
        assert abs(val[1]) <= 2 / (r * g) + 1e-12


def test_smooth_kernel_agrees():
    m = model(0, 1j, -1)
    est = ergodic.weighted_mean(m, [1, 1, 1], 1.0, kernel="smooth", tol=1e-10)
    assert est.converged
    np.testing.assert_allclose(est.value, [0, 1, 0], atol=1e-10)
    with pytest.raises(ValueError):
        ergodic.weighted_mean(m, [1, 1, 1], 1.0, kernel="nope")


def test_jdlg_split_diag_example():
    rep = ergodic.jdlg_split(model(0, 1j, -1), [1, 1, 1])
    assert rep.frequencies == [0.0, 1.0]
    np.testing.assert_allclose(rep.x_a, [1, 1, 0], atol=1e-4)
    np.testing.assert_allclose(rep.x_0, [0, 0, 1], atol=1e-4)
    assert rep.residual_sum == 0.0
    assert rep.converged and rep.flight_verified
    assert rep.method == "spectral"


def test_jdlg_split_rotation_is_almost_periodic():
    m = MatrixModel.from_generator([[0, -1], [1, 0]])
    for x in ([1, 0], [0.3, -2.0]):
        rep = ergodic.jdlg_split(m, x)
        assert np.linalg.norm(rep.x_0) <= 1e-8
        np.testing.assert_allclose(rep.x_a, x, atol=1e-8)


def test_jdlg_split_pure_flight():
    x = np.array([1.0, 1.0]) / math.sqrt(2)
    rep = ergodic.jdlg_split(model(-1, -2), x, probes=list(np.eye(2)), flight_horizons=(20.0, 1000.0))
    assert rep.frequencies == []
    np.testing.assert_array_equal(rep.x_a, 0)
    np.testing.assert_array_equal(rep.x_0, x)
    per_probe = rep.flight_mean_history.diagnostics["per_probe"]
    assert max(row[0] for row in per_probe) <= 0.06
    assert max(row[1] for row in per_probe) <= 1.1e-3
    assert rep.flight_verified


def test_jdlg_split_detects_missing_component():
    # dropping a frequency leaves an almost periodic remainder: not a flight vector
    m = model(0, 1j)
    hist, ok = ergodic._flight_check(m, np.array([0, 1.0 + 0j]), list(np.eye(2)), (20.0, 100.0, 1000.0),
                                     1 / 64, 1e-6)
    assert not ok
    assert hist.value == pytest.approx(1.0, abs=1e-6)


def test_jdlg_split_coefficients():
    m = model(0, 1j, -1)
    rep = ergodic.jdlg_split(m, [1, 2, 3])
    y = np.array([1, 1j, 1])
    c = rep.coefficients(y)
    t = np.linspace(0, 20, 41)
    orbit = np.array([np.vdot(y, apply(m, ti, rep.x_a)) for ti in t])
    trig = np.exp(1j * np.outer(t, rep.frequencies)) @ np.array(c)
    np.testing.assert_allclose(orbit, trig, atol=1e-8)


def test_flight_mean_examples():
    assert ergodic.flight_mean(model(-1), [0], [1], 100.0) == 0.0
    v = ergodic.flight_mean(model(-1), [1], [1], 1e3)
    assert v == pytest.approx((1 - math.exp(-1000)) / 1000, rel=1e-6)
    v = ergodic.flight_mean(model(1j), [1], [1], 1e3)
    assert v == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        ergodic.flight_mean(model(-1), [1], [1], 0.0)


def test_flight_mean_translation():
    # |<T(t) sin, 1_[0,π]/π>| = 2|cos t|/π, whose mean over whole periods is 4/π²
    v = ergodic.flight_mean(TranslationModel(), sinusoid(), indicator(0.0, math.pi, n_nodes=257), 4 * math.pi,
                            h=math.pi / 64)
    assert v == pytest.approx(4 / math.pi**2, rel=1e-4)
