"""Concrete bounded C0-semigroups and their sun-dual pairings.

Three variants:

* :class:`MatrixModel`: ``T(t) = exp(tA)`` on ``C^d``.  The sun dual is
  the whole dual ``C^d`` and ``T⊙(t) = exp(t A^H)``.
* :class:`TranslationModel`: ``(T(t) f)(s) = f(s + t)`` acting on
  :class:`~apsplit.signals.Signal` objects, paired with integrable
  :class:`TestFunction` objects by quadrature over the test function's window.
* :class:`DiagonalSequenceModel`: the translation model on ``l^2_N``-valued
  signals, carrying the truncated bump signal as its canonical element.

The pairing is ``<u, v> = sum_j u_j conj(v_j)`` (integral for functions),
linear in the first slot; with it ``<T(t)x, y> = <x, T⊙(t)y>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import linalg
from .signals import Signal

Vector = np.ndarray


class DomainError(ValueError):
    """Negative time on a model that is only a semigroup."""


@dataclass(frozen=True)
class MatrixModel:
    """Bounded matrix semigroup; construct with :meth:`from_generator`."""

    generator: np.ndarray = field(repr=False)
    bound: float
    tol: float = linalg.DEFAULT_TOL
    spectral: linalg.SpectralData = field(default=None, repr=False, compare=False)

    @classmethod
    def from_generator(cls, A, tol: float = linalg.DEFAULT_TOL) -> "MatrixModel":
        A = linalg.as_matrix(A)
        rep = linalg.certify_bounded(A, tol)
        if not rep.bounded:
            raise ValueError(f"generator does not define a bounded semigroup: {rep.reason}")
        return cls(A, rep.bound, tol, rep.spectral)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def is_group(self) -> bool:
        """All eigenvalues lie on the imaginary axis, so ``T(t)`` is bounded for ``t < 0`` too."""
        return all(abs(lam.real) <= self.tol for lam in self.spectral.eigenvalues)

    def dual(self) -> "MatrixModel":
        return MatrixModel.from_generator(self.generator.conj().T, self.tol)

    def unimodular_frequencies(self, merge: float = 1e-7) -> list[float]:
        """Sorted ``Im λ`` over eigenvalues with ``|Re λ| <= tol``, merged within ``merge``."""
        freqs = sorted(float(lam.imag) for lam in self.spectral.eigenvalues if abs(lam.real) <= self.tol)
        out: list[float] = []
        for w in freqs:
            if out and abs(w - out[-1]) < merge:
                continue
            out.append(w)
        return out

    def _check_time(self, t) -> None:
        if t < 0 and not self.is_group:
            raise DomainError(f"t={t} < 0 on a model that is not a group")

    def propagator(self, t: float) -> np.ndarray:
        self._check_time(t)
        return linalg.expm(self.generator, t)

    def dual_propagator(self, t: float) -> np.ndarray:
        self._check_time(t)
        return linalg.expm(self.generator.conj().T, t)

    def to_dict(self) -> dict[str, Any]:
        A = self.generator
        return {
            "variant": "matrix",
            "dim": self.dim,
            "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
        }


def _uniform_step(times: np.ndarray) -> float | None:
    if times.size < 3:
        return None
    d = np.diff(times)
    h = float(d[0])
    if h > 0 and np.allclose(d, h, rtol=1e-12, atol=1e-12 * max(1.0, abs(times[-1]))):
        return h
    return None


def matrix_orbit(A: np.ndarray, x: np.ndarray, times) -> np.ndarray:
    """``exp(t A) x`` for every ``t`` in ``times``; shape ``times.shape + x.shape``.

    Uniform grids are propagated with one matrix exponential; other
    arrays fall back to one exponential per time.
    """
    times = np.asarray(times, dtype=float)
    flat = times.ravel()
    x = np.asarray(x, dtype=complex)
    h = _uniform_step(flat)
    if h is not None:
        E = linalg.expm(A, h)
        start = linalg.expm(A, flat[0]) @ x
        out = np.concatenate(list(linalg.propagate(E, start, flat.size)))
    else:
        out = np.array([linalg.expm(A, t) @ x for t in flat]) if flat.size else np.zeros((0,) + x.shape, complex)
    return out.reshape(times.shape + x.shape)


@dataclass(frozen=True)
class TestFunction:
    """Integrable dual element for translation models.

    ``fn`` is supported in ``window`` and the element is ``s -> fn(s - offset)``.
    Pairings integrate over the shifted window by composite Simpson on
    ``n_nodes`` points, evaluating ``fn`` on the unshifted nodes so that a
    translate is integrated on exactly the translated rule.  ``tail_mass``
    bounds the ``L^1`` mass outside the window (zero for compact support).
    """

    __test__ = False

    fn: Callable[[np.ndarray], np.ndarray]
    window: tuple[float, float]
    dim: int | None = None
    n_nodes: int = 4097
    tail_mass: float = 0.0
    name: str = "phi"
    offset: float = 0.0

    def __call__(self, s):
        return self.fn(np.asarray(s, dtype=float) - self.offset)

    def shift(self, tau: float) -> "TestFunction":
        """``s -> φ(s - tau)``."""
        return TestFunction(self.fn, self.window, self.dim, self.n_nodes, self.tail_mass,
                            self.name, self.offset + tau)

    def base_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.window
        n = self.n_nodes - 1 if self.n_nodes % 2 == 0 else self.n_nodes
        s = np.linspace(a, b, n)
        w = np.ones(n)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return s, w * (b - a) / (n - 1) / 3

    def l1_norm(self) -> float:
        s, w = self.base_nodes()
        v = np.abs(self.fn(s))
        if self.dim is not None:
            v = np.linalg.norm(v, axis=-1)
        return float(w @ v) + self.tail_mass


def indicator(a: float, b: float, vector=None, n_nodes: int = 4097) -> TestFunction:
    """Normalized window ``1_{[a, b]} / (b - a)``, optionally times a fixed vector."""
    scale = 1.0 / (b - a)
    if vector is None:
        return TestFunction(lambda s: np.where((np.asarray(s) >= a) & (np.asarray(s) <= b), scale, 0.0),
                            (a, b), None, n_nodes, 0.0, f"1[{a:g},{b:g}]")
    v = np.asarray(vector, dtype=complex)
    return TestFunction(
        lambda s: np.multiply.outer(np.where((np.asarray(s) >= a) & (np.asarray(s) <= b), scale, 0.0), v),
        (a, b), v.size, n_nodes, 0.0, f"1[{a:g},{b:g}]v")


def gaussian(center: float = 0.0, width: float = 1.0, cutoff: float = 8.0, n_nodes: int = 4097) -> TestFunction:
    """Unit-mass Gaussian truncated to ``center ± cutoff*width``."""
    c = 1.0 / (width * math.sqrt(2 * math.pi))
    tail = math.erfc(cutoff / math.sqrt(2))
    return TestFunction(lambda s: c * np.exp(-0.5 * ((np.asarray(s) - center) / width) ** 2),
                        (center - cutoff * width, center + cutoff * width), None, n_nodes, tail,
                        f"gauss({center:g},{width:g})")


@dataclass(frozen=True)
class TranslationModel:
    """Translations ``(T(t)f)(s) = f(s + t)`` on bounded signals over ``R`` or ``R+``."""

    domain: str = "R"
    bound: float = 1.0

    def __post_init__(self):
        if self.domain not in ("R", "R+"):
            raise ValueError(f"domain must be 'R' or 'R+', got {self.domain!r}")

    @property
    def is_group(self) -> bool:
        return self.domain == "R"

    def _check_time(self, t) -> None:
        if t < 0 and not self.is_group:
            raise DomainError(f"t={t} < 0 on the translation semigroup over R+")

    def to_dict(self) -> dict[str, Any]:
        return {"variant": "translation", "domain": self.domain}


@dataclass(frozen=True)
class DiagonalSequenceModel(TranslationModel):
    """Translation model on ``l^2_N``-valued signals (bump layout, truncation ``N``)."""

    N: int = 12
    ramp: str = "unit"

    def __post_init__(self):
        super().__post_init__()
        if self.N < 2:
            raise ValueError(f"truncation N must be >= 2, got {self.N}")
        if self.ramp != "unit":
            raise ValueError("only unit-slope ramps are implemented")

    def canonical_signal(self) -> Signal:
        from .counterexamples import dyadic_bumps_signal

        return dyadic_bumps_signal(self.N)

    def to_dict(self) -> dict[str, Any]:
        return {"variant": "diagonal_sequence", "domain": self.domain, "N": self.N, "ramp": self.ramp}


Model = MatrixModel | TranslationModel


def function_pairing(x: Signal, phi: TestFunction) -> complex:
    """``∫ <x(s), φ(s)> ds`` over the window of ``φ``."""
    s, w = phi.base_nodes()
    xv = x(s + phi.offset) if phi.offset else x(s)
    pv = np.conj(phi.fn(s))
    vals = xv * pv if phi.dim is None else np.sum(xv * pv, axis=-1)
    return complex(w @ vals)


def pairing(model: Model, x, y) -> complex:
    """``<x, y>`` for a primal element ``x`` and a dual element ``y``."""
    if isinstance(model, MatrixModel):
        return complex(np.vdot(np.asarray(y, complex), np.asarray(x, complex)))
    return function_pairing(x, y)


def apply(model: Model, t: float, x):
    """``T(t) x``."""
    if not math.isfinite(t):
        raise DomainError(f"time must be finite, got {t}")
    if isinstance(model, MatrixModel):
        return model.propagator(t) @ np.asarray(x, dtype=complex)
    model._check_time(t)
    if t == 0:
        return x
    return x.shift(t)


def apply_dual(model: Model, t: float, x_sun):
    """``T⊙(t) x⊙``: ``exp(t A^H) x⊙`` or ``φ(· - t)``."""
    if not math.isfinite(t):
        raise DomainError(f"time must be finite, got {t}")
    if isinstance(model, MatrixModel):
        return model.dual_propagator(t) @ np.asarray(x_sun, dtype=complex)
    model._check_time(t)
    if t == 0:
        return x_sun
    return x_sun.shift(t)


def norm(model: Model, x) -> float:
    if isinstance(model, MatrixModel):
        return float(np.linalg.norm(x))
    return float(x.bound)


def dual_norm(model: Model, y) -> float:
    if isinstance(model, MatrixModel):
        return float(np.linalg.norm(y))
    return y.l1_norm()


def orbit_function(model: Model, x, x_sun) -> Signal:
    """``t -> <T⊙(t) x⊙, x>``, the scalar orbit function of the pair."""
    bound = model.bound * norm(model, x) * dual_norm(model, x_sun)
    if isinstance(model, MatrixModel):
        Ah = model.generator.conj().T
        xs = np.asarray(x_sun, dtype=complex)
        xc = np.conj(np.asarray(x, dtype=complex))

        def fn(t):
            t = np.asarray(t, dtype=float)
            if np.any(t < 0) and not model.is_group:
                raise DomainError("orbit function of a semigroup is defined for t >= 0")
            return matrix_orbit(Ah, xs, t) @ xc

        # duality makes <T⊙(t)x⊙, x> = conj(<T(t)x, x⊙>) bounded by M|x||x⊙|
        return Signal(fn, bound * (1 + 1e-9) + 1e-15, name="orbit",
                      descriptor={"kind": "orbit", "model": model.to_dict()})

    def fn(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) and not model.is_group:
            raise DomainError("orbit function of a semigroup is defined for t >= 0")
        out = [np.conj(function_pairing(x, x_sun.shift(ti))) for ti in t.ravel()]
        return np.array(out, dtype=complex).reshape(t.shape)

    return Signal(fn, bound * (1 + 1e-9) + 1e-15, name="orbit",
                  descriptor={"kind": "orbit", "model": model.to_dict()})


@dataclass
class PrecompactnessReport:
    covering_number: int
    covering_number_half: int
    center_times: list[float]
    is_eps_precompact_evidence: bool
    eps: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "covering_number": self.covering_number,
            "covering_number_half": self.covering_number_half,
            "center_times": self.center_times,
            "is_eps_precompact_evidence": self.is_eps_precompact_evidence,
            "eps": self.eps,
        }


def _greedy_net(pts: np.ndarray, eps: float, dist: Callable[[np.ndarray, int], np.ndarray]) -> list[int]:
    centers: list[int] = []
    uncovered = np.ones(len(pts), dtype=bool)
    while uncovered.any():
        i = int(np.flatnonzero(uncovered)[0])
        centers.append(i)
        uncovered &= dist(pts, i) > eps
    return centers


def orbit_precompactness_probe(model: Model, x, grid, eps: float,
                               window: tuple[float, float] | None = None,
                               n_window: int = 2001) -> PrecompactnessReport:
    """Greedy ε-net of the sampled orbit ``{T(t) x : t ∈ grid}``.

    Matrix models use the Euclidean norm.  Translation models sample each
    translate on ``window`` (default: wide enough to contain every grid
    shift) and use the sup over the window of the pointwise norm.
    Evidence of precompactness: the net for the whole grid is not
    materially larger than the net for its first half.  Evidence only,
    never a proof.
    """
    grid = np.asarray(sorted(grid), dtype=float)
    if grid.size == 0 or eps <= 0:
        raise ValueError("need a nonempty grid and eps > 0")
    if isinstance(model, MatrixModel):
        pts = matrix_orbit(model.generator, np.asarray(x, complex), grid)

        def dist(p, i):
            return np.linalg.norm(p - p[i], axis=1)
    else:
        if window is None:
            span = float(np.max(np.abs(grid))) + 1.0
            window = (-span, span)
        u = np.linspace(window[0], window[1], n_window)
        pts = np.array([x(u + t) for t in grid])

        def dist(p, i):
            d = np.abs(p - p[i])
            if d.ndim == 3:
                d = np.linalg.norm(d, axis=-1)
            return d.max(axis=1)

    full = _greedy_net(pts, eps, dist)
    half = _greedy_net(pts[: max(1, len(pts) // 2)], eps, dist)
    evidence = len(full) <= 1.1 * len(half) + 1
    return PrecompactnessReport(len(full), len(half), [float(grid[i]) for i in full], evidence, eps)
