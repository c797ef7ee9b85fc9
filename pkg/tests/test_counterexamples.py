import math
from fractions import Fraction

import numpy as np
import pytest

from apsplit import counterexamples as cx


def test_log_sin_examples():
    assert cx.f_log_sin(0.0) == 0.0
    assert cx.f_log_sin(math.exp(math.pi / 2) - 1) == pytest.approx(1.0, abs=1e-15)
    t = math.exp(2 * 10 * math.pi + math.pi / 2)
    assert cx.f_log_sin(t + 5) == pytest.approx(1.0, abs=1e-10)
    ts = np.array([-3.0, 0.5, 7.0])
    np.testing.assert_array_equal(cx.f_log_sin(ts), cx.f_log_sin(-ts))


def test_tent():
    assert cx.tent_phi(0) == 1.0
    assert cx.tent_phi(Fraction(1, 4)) == 0.0
    assert cx.tent_phi(Fraction(1, 8)) == 0.5
    assert cx.tent_phi(0.125) == 0.5
    assert cx.tent_phi(0.3) == 0.0
    with pytest.raises(ValueError):
        cx.tent_phi(-0.1)
    with pytest.raises(ValueError):
        cx.tent_phi(np.array([0.1, -0.1]))


def test_membership_small_numbers():
    # 0 = 16^0 - 16^0, 2 = 1 + 1, 15 = 16 - 1, 17 = 16 + 1, 32 = 16 + 16
    for k in (0, 2, 15, 17, 32, 240, 272, 4097):
        assert cx.in_F(k)
    for k in (1, 3, 4, 16, 31, 33, 256, 273):
        assert not cx.in_F(k)
    assert not cx.in_F(-2)


def test_g_F_and_h_examples():
    assert cx.g_F(272) == 1.0
    assert cx.h(272) == pytest.approx(math.sin(math.pi / 8 * math.log2(273)), abs=1e-15)
    assert cx.g_F(3) == 0.0 and cx.h(3) == 0.0
    assert cx.g_F(272.5) == 0.0
    assert cx.g_F(Fraction(2177, 8)) == 0.5  # 272 + 1/8
    vals = cx.g_F(np.array([272.0, 272.125, 272.5, 3.0, -272.0]))
    np.testing.assert_allclose(vals, [1.0, 0.5, 0.0, 0.0, 0.0])


def test_g_F_exact_for_huge_integers():
    big = 16**61 + 16**4
    assert cx.g_F(big) == 1.0
    assert cx.g_F(big + 1) == 0.0
    assert not cx.in_F(16**61)
    assert cx.in_F(16**61 - 16**7)


def test_membership_matches_enumeration_below_70000():
    enum = cx.brute_force_E(5)
    for k in range(70000):
        assert cx.in_F(k) == (k in enum), k


def test_membership_near_enumerated_elements():
    enum = sorted(e for e in cx.brute_force_E(20) if e >= 0)
    for e in enum:
        assert cx.in_F(e)
        for d in (-2, -1, 1, 2):
            assert cx.in_F(e + d) == (e + d in enum)


def test_membership_random_samples(rng):
    enum = cx.brute_force_E(16)
    for k in rng.integers(0, 2**62, size=2000):
        assert cx.in_F(int(k)) == (int(k) in enum)


def test_bump_vector_examples():
    a, b = cx.bump_support(3)
    assert (a, b) == (128, 256)
    np.testing.assert_array_equal(cx.dyadic_bump_vector(a, 6), np.zeros(6))
    expected = np.zeros(6)
    expected[2] = 1.0
    np.testing.assert_array_equal(cx.dyadic_bump_vector((a + b) // 2, 6), expected)
    np.testing.assert_array_equal(cx.dyadic_bump_vector(7.5, 6), np.zeros(6))
    assert cx.dyadic_bump_vector(a + 0.25, 6)[2] == pytest.approx(0.25)
    ts = np.linspace(0, 2**14, 200001)
    vals = cx.dyadic_bump_vector(ts, 6)
    assert np.all(np.count_nonzero(vals, axis=1) <= 1)
    with pytest.raises(ValueError):
        cx.dyadic_bump_vector(1.0, 1)


def test_log_sin_shift_reproduction():
    rep = cx.repro_log_sin_shift(m_range=[20], shifts=[50.0])
    assert rep.values["f(s+t_m)"]["20"][0] == pytest.approx(1.0, abs=1e-10)
    rep = cx.repro_log_sin_shift(m_range=[5], shifts=[0.0])
    assert rep.values["f(s+t_m)"]["5"][0] == pytest.approx(1.0, abs=1e-6)
    full = cx.repro_log_sin_shift()
    assert full.passed
    with pytest.raises(ValueError):
        cx.repro_log_sin_shift(m_range=[])


def test_power16_values():
    assert cx.h(16**13 + 16**2) == pytest.approx(1.0, abs=1e-3)
    assert abs(cx.h(16**3 + 16**40)) <= 1e-4
    for n in range(0, 12):
        for m in range(0, n + 2):
            assert cx.g_F(16 ** (n + 1) + 16**m) == 1.0


def test_power16_reproduction():
    rep = cx.repro_power16_double_limit()
    assert rep.passed
    assert rep.values["membership_agrees"]
    assert rep.values["double_limit"]["verdict"] == "violation"
    with pytest.raises(ValueError):
        cx.repro_power16_double_limit(budget=3)


def test_dyadic_bump_reproduction():
    rep = cx.repro_dyadic_bumps()
    assert rep.values["array"]["3,8"] == 1.0
    t = 2**16 + 2**7 + 1
    for n in range(2, 13):
        lo, hi = cx.bump_support(n)
        assert not (lo < t < hi)
    assert rep.values["array"]["8,3"] == 0.0
    assert rep.passed
    zero = cx.window_probe(12, np.zeros(12))
    assert cx.translate_pairing(2**11 + 7.0, 12, zero) == 0.0


def test_reproductions_deterministic():
    a = cx.repro_dyadic_bumps().to_dict()
    b = cx.repro_dyadic_bumps().to_dict()
    assert a == b
    assert cx.repro_log_sin_shift().to_dict() == cx.repro_log_sin_shift().to_dict()
