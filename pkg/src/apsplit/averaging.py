"""Horizon schedules, limit records and quadrature shared by the averaging code."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

#: Cauchy tolerance for declaring a long-time limit.
DEFAULT_TOL = 1e-6
#: Base quadrature step.
DEFAULT_H = 1.0 / 64
#: Number of trailing terms averaged by the sequence tail rule.
TAIL_K = 5


@dataclass(frozen=True)
class HorizonSchedule:
    """Geometric averaging horizons ``r_k = r0 * growth**k``, ``k = 0..k_max``."""

    r0: float = 16.0
    k_max: int = 20
    growth: float = 2.0

    def __post_init__(self):
        if not (self.r0 > 0 and math.isfinite(self.r0)):
            raise ValueError(f"r0 must be positive and finite, got {self.r0}")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")

    def horizons(self) -> list[float]:
        return [self.r0 * self.growth**k for k in range(self.k_max + 1)]

    @classmethod
    def ending_at(cls, r_final: float, steps: int = 3, growth: float = 2.0) -> "HorizonSchedule":
        """Schedule whose last horizon is exactly ``r_final``."""
        return cls(r0=r_final / growth**steps, k_max=steps, growth=growth)

    def to_dict(self) -> dict[str, float]:
        return {"r0": self.r0, "k_max": self.k_max, "growth": self.growth}


@dataclass
class LimitEstimate:
    """A long-time limit estimated along a horizon schedule.

    ``residuals[k-1] = ||value(r_k) - value(r_{k-1})||``; the estimate is
    converged once two successive residuals are at most ``tol``.
    """

    value: Any
    r_history: list[float]
    residuals: list[float]
    converged: bool
    tol: float
    quad_errors: list[float] = field(default_factory=list)
    kernel: str = "cesaro"
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return not self.converged

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "r_history": list(self.r_history),
            "residuals": list(self.residuals),
            "converged": self.converged,
            "tol": self.tol,
            "quad_errors": list(self.quad_errors),
            "kernel": self.kernel,
            "diagnostics": dict(self.diagnostics),
        }


def schedule_limit(evaluate: Callable[[float], tuple[Any, float]], schedule: HorizonSchedule,
                   tol: float, kernel: str = "cesaro") -> LimitEstimate:
    """Run ``evaluate(r) -> (value, quad_error)`` along the schedule.

    Stops at the first horizon where the last two residuals are ``<= tol``.
    """
    values, rs, res, qerr = [], [], [], []
    converged = False
    for r in schedule.horizons():
        v, q = evaluate(r)
        if values:
            res.append(float(np.linalg.norm(np.asarray(v) - np.asarray(values[-1]))))
        values.append(v)
        rs.append(r)
        qerr.append(float(q))
        if len(res) >= 2 and res[-1] <= tol and res[-2] <= tol:
            converged = True
            break
    return LimitEstimate(values[-1], rs, res, converged, tol, qerr, kernel)


def tail_limit(values: Sequence, K: int = TAIL_K, tol: float = DEFAULT_TOL):
    """Limit of a sequence by the tail rule, or ``None``.

    The last ``K`` terms must differ successively by at most ``tol``; the
    limit is their mean.
    """
    if len(values) < K:
        return None
    tail = np.asarray(values[-K:], dtype=complex)
    if np.any(~np.isfinite(tail)):
        return None
    if np.max(np.abs(np.diff(tail)), initial=0.0) > tol:
        return None
    m = complex(np.mean(tail))
    return m.real if m.imag == 0 else m


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights (without the ``h/3`` factor) for ``n`` even."""
    if n < 2 or n % 2:
        raise ValueError("Simpson needs an even number of intervals >= 2")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def simpson(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, h: float,
            chunk: int = 1 << 20) -> tuple[complex, complex]:
    """Composite Simpson of ``fn`` on ``[a, b]`` at steps ``h`` and ``h/2``.

    Returns ``(S_{h/2}, S_h)``; samples are evaluated once, in chunks.
    """
    n = 2 * max(1, math.ceil((b - a) / (2 * h)))
    n2 = 2 * n
    step = (b - a) / n2
    fine = coarse = 0j
    for start in range(0, n2 + 1, chunk):
        j = np.arange(start, min(n2 + 1, start + chunk))
        vals = fn(a + j * step)
        # fine weights 1,4,2,...,4,1 on j; coarse weights on even j only
        w_fine = np.where(j % 2 == 1, 4.0, 2.0)
        w_coarse = np.where(j % 4 == 2, 4.0, 2.0) * (j % 2 == 0)
        ends = (j == 0) | (j == n2)
        w_fine[ends] = 1.0
        w_coarse[ends] = 1.0
        fine += np.dot(w_fine, vals)
        coarse += np.dot(w_coarse, vals)
    return fine * step / 3, coarse * 2 * step / 3
