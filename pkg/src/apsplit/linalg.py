"""Dense complex linear algebra for matrix semigroups.

Matrix exponentials, eigendecomposition with spectral projectors, and a
certified bound for ``sup_t ||exp(tA)||``.  Everything is dense; the
dimension is capped at :data:`MAX_DIM`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

MAX_DIM = 64

#: Band around the imaginary axis, and rank threshold for semisimplicity.
DEFAULT_TOL = 1e-9

#: Eigenvalues closer than this (relative to ``max(1, ||A||)``) are one cluster.
CLUSTER_TOL = 1e-7


class SpectralError(RuntimeError):
    """Eigenvalue computation failed."""


def as_matrix(A) -> np.ndarray:
    """Validate and convert ``A`` to a square complex array."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    n = M.shape[0]
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"matrix dimension must be in [1, {MAX_DIM}], got {n}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def expm(A, t: float = 1.0) -> np.ndarray:
    """Return ``exp(t A)``.

    Scaling and squaring with a degree-13 Padé core (scipy).  Raises
    ``OverflowError`` when the result is not representable.
    """
    M = as_matrix(A)
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        E = scipy.linalg.expm(t * M)
    if not np.all(np.isfinite(E)):
        raise OverflowError(f"exp(tA) overflows at t={t}")
    return E


@dataclass(frozen=True)
class SpectralData:
    """Distinct eigenvalues of a matrix with their spectral projectors.

    ``projectors[i]`` is ``None`` when ``defective[i]`` is true.
    """

    eigenvalues: np.ndarray
    multiplicities: tuple[int, ...]
    projectors: tuple[np.ndarray | None, ...]
    defective: tuple[bool, ...]
    scale: float = 1.0

    @property
    def diagonalizable(self) -> bool:
        return not any(self.defective)

    def imaginary_axis(self, tol: float = DEFAULT_TOL) -> list[int]:
        """Indices of eigenvalues with ``|Re λ| <= tol``."""
        return [i for i, lam in enumerate(self.eigenvalues) if abs(lam.real) <= tol]

    def projector_sum(self) -> np.ndarray:
        """Sum of the available projectors (the identity when diagonalizable)."""
        avail = [P for P in self.projectors if P is not None]
        if not avail:
            raise ValueError("no projector available")
        return sum(avail)


def _cluster(w: np.ndarray, radius: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    centers: list[complex] = []
    for i in np.lexsort((w.real, w.imag)):
        for c, members in enumerate(clusters):
            if abs(w[i] - centers[c]) <= radius:
                members.append(int(i))
                centers[c] = complex(np.mean(w[members]))
                break
        else:
            clusters.append([int(i)])
            centers.append(complex(w[i]))
    return clusters


def eig(A, tol: float = DEFAULT_TOL, cluster_tol: float = CLUSTER_TOL) -> SpectralData:
    """Distinct eigenvalues of ``A`` with spectral projectors.

    An eigenvalue ``λ`` of algebraic multiplicity ``k`` is semisimple when
    the ``k`` smallest singular values of ``A - λI`` are below
    ``tol * max(1, ||A||)``.  Its projector is then built from the right
    and left null spaces, ``P = R (L^H R)^{-1} L^H``, which stays valid
    when other eigenvalues are defective.
    """
    M = as_matrix(A)
    n = M.shape[0]
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    try:
        w = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(
            f"QR iteration for eigenvalues did not converge on a {n}x{n} matrix: {exc}"
        ) from exc

    eigenvalues, mults, projectors, defective = [], [], [], []
    eye = np.eye(n)
    for members in _cluster(w, cluster_tol * scale):
        k = len(members)
        lam = complex(np.mean(w[members]))
        U, s, Vh = np.linalg.svd(M - lam * eye)
        semisimple = s[n - k] <= tol * scale
        P = None
        if semisimple:
            R = Vh[n - k:].conj().T
            L = U[:, n - k:]
            P = R @ np.linalg.solve(L.conj().T @ R, L.conj().T)
        eigenvalues.append(lam)
        mults.append(k)
        projectors.append(P)
        defective.append(not semisimple)

    order = sorted(range(len(eigenvalues)), key=lambda i: (eigenvalues[i].imag, eigenvalues[i].real))
    return SpectralData(
        eigenvalues=np.array([eigenvalues[i] for i in order]),
        multiplicities=tuple(mults[i] for i in order),
        projectors=tuple(projectors[i] for i in order),
        defective=tuple(defective[i] for i in order),
        scale=scale,
    )


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    bound: float
    reason: str
    spectral: SpectralData = field(repr=False)


def _van_loan_bound(As: np.ndarray) -> float:
    """``sup_t ||exp(t As)||`` for a matrix with spectrum in ``Re λ < 0``.

    With the Schur form ``As = Z (D + N) Z^H`` and ``α = -max Re λ``,
    ``||exp(t As)|| <= exp(-α t) sum_k (t ||N||)^k / k!``; each term is
    maximized separately at ``t = k / α``.
    """
    if As.size == 0:
        return 0.0
    T, _ = scipy.linalg.schur(As, output="complex")
    alpha = -float(np.max(np.diag(T).real))
    nu = float(np.linalg.norm(np.triu(T, 1), "fro"))
    total = 1.0
    for k in range(1, As.shape[0]):
        total += (nu * k / (alpha * math.e)) ** k / math.factorial(k)
    return total


def certify_bounded(A, tol: float = DEFAULT_TOL) -> BoundednessReport:
    """Decide whether ``{exp(tA)}_{t >= 0}`` is bounded and bound its norm.

    Bounded iff every eigenvalue has ``Re λ <= tol`` and those with
    ``|Re λ| <= tol`` are semisimple.  The returned ``bound`` is the
    smaller of two certified estimates: ``sum_λ ||P_λ||`` together with the
    unit-column eigenvector condition number (diagonalizable case), and
    ``sum_{λ ∈ iR} ||P_λ|| + ||Q|| * VL(A|Q)`` where ``Q`` projects on the
    stable part and ``VL`` is the Schur/Van Loan bound.
    """
    M = as_matrix(A)
    spec = eig(M, tol)
    unstable = [lam for lam in spec.eigenvalues if lam.real > tol]
    if unstable:
        return BoundednessReport(False, math.inf, f"eigenvalue {unstable[0]:.6g} has Re > {tol:g}", spec)
    axis = spec.imaginary_axis(tol)
    bad = [spec.eigenvalues[i] for i in axis if spec.defective[i]]
    if bad:
        return BoundednessReport(
            False, math.inf, f"eigenvalue {bad[0]:.6g} on the imaginary axis is defective", spec
        )

    n = M.shape[0]
    P_axis = [spec.projectors[i] for i in axis]
    a_part = sum(float(np.linalg.norm(P, 2)) for P in P_axis)
    Q = np.eye(n) - (sum(P_axis) if P_axis else 0.0)
    bound = math.inf
    if np.linalg.norm(Q) > 1e-12:
        Uq, sq, _ = np.linalg.svd(Q)
        r = int(np.sum(sq > 1e-8 * max(1.0, sq[0])))
        B = Uq[:, :r]
        As = B.conj().T @ M @ B
        bound = a_part + float(np.linalg.norm(Q, 2)) * _van_loan_bound(As)
    else:
        bound = a_part

    if spec.diagonalizable:
        bound = min(bound, sum(float(np.linalg.norm(P, 2)) for P in spec.projectors))
        V = np.hstack([_unit_basis(P) for P in spec.projectors])
        bound = min(bound, float(np.linalg.cond(V)))
    return BoundednessReport(True, max(bound, 1.0), "spectral criterion satisfied", spec)


def _unit_basis(P: np.ndarray) -> np.ndarray:
    U, s, _ = np.linalg.svd(P)
    r = int(np.sum(s > 1e-8 * max(1.0, s[0])))
    return U[:, :r] if r else U[:, :0]


def geometric_sum(B: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sum_{k<m} B^k, B^m)`` using O(log m) products."""
    n = B.shape[0]
    eye = np.eye(n, dtype=complex)
    if m == 0:
        return np.zeros_like(eye), eye
    G, P = eye.copy(), B.copy()
    for bit in bin(m)[3:]:
        G = G + P @ G
        P = P @ P
        if bit == "1":
            G = eye + B @ G
            P = B @ P
    return G, P


def propagate(E: np.ndarray, x: np.ndarray, n: int, block: int = 2048):
    """Yield chunks of ``[E^j x for j in range(n)]`` as row blocks.

    ``x`` has shape ``(d,)`` or ``(d, k)``; each yielded array has shape
    ``(b, d)`` or ``(b, d, k)``.
    """
    x = np.asarray(x, dtype=complex)
    vec = x.ndim == 1
    X = x[:, None] if vec else x
    b = min(block, n)
    first = np.empty((b,) + X.shape, dtype=complex)
    first[0] = X
    # doubling: rows [s, 2s) are E^s applied to rows [0, s)
    s, Es = 1, E
    while s < b:
        take = min(s, b - s)
        first[s:s + take] = np.einsum("ij,bjk->bik", Es, first[:take])
        s += take
        Es = Es @ Es
    Eb = np.linalg.matrix_power(E, b)
    done = 0
    chunk = first
    while done < n:
        take = min(b, n - done)
        out = chunk[:take]
        yield out[..., 0] if vec else out
        done += take
        if done < n:
            chunk = np.einsum("ij,bjk->bik", Eb, chunk)
