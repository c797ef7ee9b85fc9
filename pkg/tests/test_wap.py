import math

import numpy as np
import pytest

from apsplit import wap
from apsplit.averaging import HorizonSchedule
from apsplit.counterexamples import h_signal, log_sin_signal, power16_families
from apsplit.signals import constant, exp_i, sinusoid, zero
from apsplit.wap import SequenceFamily


def test_family_values():
    assert SequenceFamily.power16(0, 5).value(3) == 4096
    assert SequenceFamily.power16_shift(0, 5).value(3) == 65536
    assert SequenceFamily.exponential(0.5, 0, 3).value(2) == pytest.approx(math.exp(4 * math.pi + 0.5))
    assert SequenceFamily.arithmetic(1.0, 0.5, 0, 10).value(4) == 3.0
    assert SequenceFamily.power16(0, 12, stride=4).indices() == [0, 4, 8, 12]
    assert SequenceFamily.explicit([1, 3, 7]).value(2) == 7


def test_family_validation():
    with pytest.raises(OverflowError, match="m_max=64"):
        SequenceFamily.power16(0, 64)
    with pytest.raises(OverflowError, match="m_max=112"):
        SequenceFamily.exponential(0.0, 0, 112)
    with pytest.raises(ValueError):
        SequenceFamily.explicit([1, 1, 2])
    with pytest.raises(ValueError):
        SequenceFamily.arithmetic(0.0, -1.0, 0, 5)
    with pytest.raises(ValueError):
        SequenceFamily("nope")


def test_family_round_trip():
    for fam in (SequenceFamily.exponential(math.pi, 2, 30, 2), SequenceFamily.arithmetic(0.5, 2.0, 0, 9),
                SequenceFamily.power16_shift(1, 20, 4), SequenceFamily.explicit([0.0, 2.0, 5.0])):
        assert SequenceFamily.from_dict(fam.to_dict()) == fam


def test_double_limit_constant():
    for famA, famB in wap.default_bank()[:3]:
        rep = wap.double_limit_probe(constant(0.25), famA, famB)
        assert rep.nu == rep.mu == 0.25
        assert rep.verdict == "consistent"


def test_double_limit_log_sin_violation():
    famA = SequenceFamily.exponential(math.pi / 2, 0, 40)
    famB = SequenceFamily.exponential(3 * math.pi / 2, 0, 40)
    rep = wap.double_limit_probe(log_sin_signal(), famA, famB)
    # asymptotic oracle: sin(ln(e^a + e^b + 1)) -> sin(max(a, b))
    assert rep.nu == pytest.approx(1.0, abs=1e-6)
    assert rep.mu == pytest.approx(-1.0, abs=1e-6)
    assert rep.discrepancy == pytest.approx(2.0, abs=1e-6)
    assert rep.verdict == "violation"


def test_log_sin_asymptotic_oracle():
    f = log_sin_signal()
    for a, b in ((12 * math.pi + math.pi / 2, 2 * math.pi + 3 * math.pi / 2),
                 (4 * math.pi + math.pi / 2, 16 * math.pi + 3 * math.pi / 2)):
        gap = abs(a - b)
        assert abs(f(math.exp(a) + math.exp(b)) - math.sin(max(a, b))) <= 2 * math.exp(-gap)


def test_double_limit_power16_bumps():
    famA, famB = power16_families(15)
    rep = wap.double_limit_probe(h_signal(), famA, famB)
    assert rep.verdict == "violation"
    assert {round(rep.nu.real, 6), round(rep.mu.real, 6)} == {0.0, 1.0}


def test_double_limit_inconclusive_when_short():
    famA = SequenceFamily.exponential(0.0, 0, 4)
    rep = wap.double_limit_probe(log_sin_signal(), famA, famA)
    assert rep.verdict == "inconclusive" and rep.discrepancy is None


def test_wap_verdict_examples():
    assert wap.wap_verdict(exp_i(1.0)).verdict == "no_violation_found"
    assert wap.wap_verdict(zero()).verdict == "no_violation_found"
    v = wap.wap_verdict(log_sin_signal())
    assert v.verdict == "violation_found"
    famA, famB, rep = v.counterexample
    assert famA.kind == famB.kind == "exponential"
    with pytest.raises(ValueError):
        wap.wap_verdict(zero(), bank=[])


def test_exp_i_factorization_oracle():
    # e^{i(t+s)} = e^{it}e^{is}: iterated limits exist only if both sequences converge mod 2π
    famA = SequenceFamily.arithmetic(0.0, 2 * math.pi, 0, 30)
    famB = SequenceFamily.arithmetic(1.0, 2 * math.pi, 0, 30)
    rep = wap.double_limit_probe(exp_i(1.0), famA, famB)
    assert rep.verdict == "consistent"
    assert abs(rep.nu - np.exp(1j)) < 1e-6 and abs(rep.mu - np.exp(1j)) < 1e-6


def test_bohr_coefficient_examples():
    est = wap.bohr_coefficient(constant(0.3), 0.0)
    assert est.converged and est.value == pytest.approx(0.3, abs=1e-12)
    est = wap.bohr_coefficient(sinusoid(1.0), 1.0)
    assert abs(est.value - 1 / 2j) <= 1e-3
    f = sinusoid(1.0) + sinusoid(math.sqrt(2))
    est = wap.bohr_coefficient(f, math.sqrt(2))
    assert abs(abs(est.value) - 0.5) <= 1e-3


def test_bohr_coefficient_nonconvergent_is_inconclusive():
    est = wap.bohr_coefficient(log_sin_signal(), 0.0, HorizonSchedule(16, 6))
    assert not est.converged


def test_ap_probe_periodic():
    p = 2 * math.pi
    rep = wap.ap_probe(sinusoid(), 0.1, 200.0, gap_bound=p + 0.1)
    assert rep.relatively_dense_evidence
    mults = np.arange(0, 200.0, p)
    for k in mults:
        assert min(abs(np.array(rep.epsilon_periods) - k)) < 1e-2
    # nothing else qualifies: every found τ is near a multiple
    for tau in rep.epsilon_periods:
        assert abs(tau - p * round(tau / p)) < 0.02


def test_ap_probe_quasi_periodic():
    rep = wap.ap_probe(sinusoid(1.0) + sinusoid(math.sqrt(2)), 0.1, 1e4, gap_bound=1000.0)
    assert rep.epsilon_periods
    assert rep.relatively_dense_evidence
    # Diophantine oracle: |e^{iτ}-1| + |e^{i√2τ}-1| <= 0.1 certifies a 0.1-period
    tau = np.arange(1.0, 1e4, 1e-3)
    bound = np.abs(np.exp(1j * tau) - 1) + np.abs(np.exp(1j * math.sqrt(2) * tau) - 1)
    certified = tau[bound <= 0.1]
    assert certified.size
    found = np.array(rep.epsilon_periods)
    for t in certified[:: max(1, certified.size // 50)]:
        assert np.min(np.abs(found - t)) < 0.5


def test_ap_probe_log_sin():
    rep = wap.ap_probe(log_sin_signal(), 0.1, 1e4, gap_bound=1000.0)
    assert not rep.relatively_dense_evidence
