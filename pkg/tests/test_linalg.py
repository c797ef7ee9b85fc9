import math

import numpy as np
import pytest

from apsplit import linalg


def series_expm(A, terms=25):
    out = np.eye(len(A), dtype=complex)
    term = np.eye(len(A), dtype=complex)
    for k in range(1, terms + 1):
        term = term @ A / k
        out = out + term
    return out


def test_expm_of_zero_is_identity():
    np.testing.assert_array_equal(linalg.expm(np.zeros((3, 3)), 7.0), np.eye(3))


def test_expm_diagonal_closed_form():
    E = linalg.expm(np.diag([1j, -1]), math.pi)
    np.testing.assert_allclose(E, np.diag([-1, math.exp(-math.pi)]), atol=1e-15)


def test_expm_matches_power_series(rng):
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    A /= np.linalg.norm(A, 2)
    E = linalg.expm(A, 1.0)
    ref = series_expm(A)
    assert np.linalg.norm(E - ref) / np.linalg.norm(ref) <= 1e-12


def test_expm_overflow_and_bad_time():
    with pytest.raises(OverflowError):
        linalg.expm(np.diag([1000.0]), 1.0)
    with pytest.raises(ValueError):
        linalg.expm(np.eye(2), math.inf)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((65, 65)), np.array([[np.nan]])])
def test_as_matrix_rejects(bad):
    with pytest.raises(ValueError):
        linalg.as_matrix(bad)


def test_eig_diagonal_projectors():
    spec = linalg.eig(np.diag([2j, -1]))
    # sorted by imaginary part
    np.testing.assert_allclose(spec.eigenvalues, [-1, 2j], atol=1e-14)
    np.testing.assert_allclose(spec.projectors[0], np.diag([0, 1]), atol=1e-12)
    np.testing.assert_allclose(spec.projectors[1], np.diag([1, 0]), atol=1e-12)
    assert spec.diagonalizable


def test_eig_rotation():
    spec = linalg.eig([[0, -1], [1, 0]])
    np.testing.assert_allclose(spec.eigenvalues, [-1j, 1j], atol=1e-14)


def test_eig_recovers_constructed_spectrum(rng):
    d = rng.normal(size=5) + 1j * rng.normal(size=5)
    V = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    spec = linalg.eig(V @ np.diag(d) @ np.linalg.inv(V))
    got = sorted(spec.eigenvalues, key=lambda z: (z.imag, z.real))
    want = sorted(d, key=lambda z: (z.imag, z.real))
    np.testing.assert_allclose(got, want, atol=1e-8)


def test_eig_flags_defective_and_keeps_other_projectors():
    A = np.array([[1j, 1, 0], [0, 1j, 0], [0, 0, -1]])
    spec = linalg.eig(A)
    by_value = dict(zip(np.round(spec.eigenvalues, 6), zip(spec.defective, spec.projectors, spec.multiplicities)))
    defective, P, k = by_value[1j]
    assert defective and P is None and k == 2
    defective, P, k = by_value[-1]
    assert not defective
    np.testing.assert_allclose(A @ P, -P, atol=1e-10)


def test_projector_algebra(rng):
    V = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    D = np.diag([1j, -0.5, 2j, -1 + 1j])
    A = V @ D @ np.linalg.inv(V)
    spec = linalg.eig(A)
    Ps = spec.projectors
    assert np.linalg.norm(spec.projector_sum() - np.eye(4)) <= 1e-10
    for i, Pi in enumerate(Ps):
        assert np.linalg.norm(A @ Pi - spec.eigenvalues[i] * Pi) <= 1e-8
        for j, Pj in enumerate(Ps):
            assert np.linalg.norm(Pi @ Pj - (Pi if i == j else 0)) <= 1e-8
    recon = sum(lam * P for lam, P in zip(spec.eigenvalues, Ps))
    assert np.linalg.norm(A - recon) <= 1e-8


def test_certify_examples():
    assert linalg.certify_bounded(np.diag([1j, -1])).bounded
    assert not linalg.certify_bounded([[1j, 1], [0, 1j]]).bounded
    assert not linalg.certify_bounded(np.diag([0.5])).bounded


def test_certify_defective_stable_block_is_bounded():
    A = np.array([[-1, 5], [0, -1]], dtype=complex)
    rep = linalg.certify_bounded(A)
    assert rep.bounded
    sup = max(np.linalg.norm(linalg.expm(A, t), 2) for t in np.linspace(0, 100, 2001))
    assert sup <= rep.bound + 1e-6


def test_geometric_sum(rng):
    B = 0.3 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    for m in (0, 1, 2, 7, 16, 33):
        G, P = linalg.geometric_sum(B, m)
        ref = sum((np.linalg.matrix_power(B, k) for k in range(m)), np.zeros((3, 3), complex))
        np.testing.assert_allclose(G, ref, atol=1e-12)
        np.testing.assert_allclose(P, np.linalg.matrix_power(B, m), atol=1e-12)


def test_propagate(rng):
    E = linalg.expm(np.array([[0, -1], [1, 0]]), 0.01)
    x = np.array([1.0, 0.5])
    rows = np.concatenate(list(linalg.propagate(E, x, 5000, block=64)))
    assert rows.shape == (5000, 2)
    t = 0.01 * np.arange(5000)
    ref = np.stack([np.cos(t) - 0.5 * np.sin(t), np.sin(t) + 0.5 * np.cos(t)], axis=1)
    np.testing.assert_allclose(rows, ref, atol=1e-11)
