"""Bounded evaluable functions of time.

A :class:`Signal` wraps a vectorized callable together with a declared
sup bound, an optional exact scalar evaluator (used for Python ``int`` and
``Fraction`` arguments, where float rounding would destroy the integer
structure some counterexamples depend on), and a serializable descriptor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Any, Callable

import numpy as np

BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class Signal:
    fn: Callable[[np.ndarray], np.ndarray]
    bound: float
    dim: int | None = None
    name: str = "signal"
    descriptor: dict[str, Any] = field(default_factory=dict, compare=False)
    scalar_fn: Callable[[Any], Any] | None = field(default=None, compare=False)
    check_bound: bool = True

    def __call__(self, t):
        if isinstance(t, (int, Fraction)) and not isinstance(t, bool) and self.scalar_fn is not None:
            value = self.scalar_fn(t)
        elif np.ndim(t) == 0 and not isinstance(t, np.ndarray):
            value = self.fn(np.asarray(float(t)))
            value = value[()] if self.dim is None else np.asarray(value)
        else:
            value = self.fn(np.asarray(t, dtype=float))
        if self.check_bound:
            self._check(value)
        return value

    def _check(self, value) -> None:
        v = np.abs(np.asarray(value))
        if self.dim is not None:
            v = np.sqrt(np.sum(v**2, axis=-1))
        if v.size and float(np.max(v)) > self.bound * (1 + BOUND_SLACK) + 1e-12:
            raise ValueError(
                f"{self.name}: value {float(np.max(v)):.6g} exceeds declared bound {self.bound:.6g}"
            )

    def shift(self, tau: float) -> "Signal":
        """The translate ``t -> f(t + tau)``."""
        base = self
        exact = None
        if self.scalar_fn is not None and isinstance(tau, (int, Fraction)):
            exact = lambda t: base.scalar_fn(t + tau)  # noqa: E731
        return Signal(
            fn=lambda t: base.fn(np.asarray(t, dtype=float) + tau),
            bound=self.bound,
            dim=self.dim,
            name=f"{self.name}(.+{tau:g})",
            descriptor={"kind": "shift", "tau": float(tau), "of": self.descriptor},
            scalar_fn=exact,
            check_bound=self.check_bound,
        )

    def __add__(self, other: "Signal") -> "Signal":
        return linear_combination([1.0, 1.0], [self, other])

    def __mul__(self, c: Number) -> "Signal":
        return linear_combination([c], [self])

    __rmul__ = __mul__

    def __neg__(self) -> "Signal":
        return linear_combination([-1.0], [self])

    def __sub__(self, other: "Signal") -> "Signal":
        return linear_combination([1.0, -1.0], [self, other])


def linear_combination(coeffs, signals) -> Signal:
    coeffs = [complex(c) if isinstance(c, complex) else c for c in coeffs]
    if len(coeffs) != len(signals) or not signals:
        raise ValueError("need one coefficient per signal")
    dims = {s.dim for s in signals}
    if len(dims) != 1:
        raise ValueError("cannot combine signals of different codomains")

    def fn(t):
        return sum(c * s.fn(t) for c, s in zip(coeffs, signals))

    exact = None
    if all(s.scalar_fn is not None for s in signals):
        exact = lambda t: sum(c * s.scalar_fn(t) for c, s in zip(coeffs, signals))  # noqa: E731
    return Signal(
        fn=fn,
        bound=float(sum(abs(c) * s.bound for c, s in zip(coeffs, signals))),
        dim=dims.pop(),
        name="+".join(s.name for s in signals),
        descriptor={
            "kind": "combo",
            "terms": [{"coeff": _jsonable_number(c), "signal": s.descriptor} for c, s in zip(coeffs, signals)],
        },
        scalar_fn=exact,
        check_bound=all(s.check_bound for s in signals),
    )


def tabulated(times, values, bound: float | None = None, name: str = "table") -> Signal:
    """Piecewise-linear interpolation of samples; constant beyond the ends."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values)
    if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("tabulation times must be strictly increasing with at least two points")
    if values.shape[0] != len(times):
        raise ValueError("one value per tabulation time required")
    dim = None if values.ndim == 1 else values.shape[1]
    cplx = np.iscomplexobj(values)

    def interp1(t, v):
        if cplx:
            return np.interp(t, times, v.real) + 1j * np.interp(t, times, v.imag)
        return np.interp(t, times, v)

    def fn(t):
        if dim is None:
            return interp1(t, values)
        return np.stack([interp1(t, values[:, j]) for j in range(dim)], axis=-1)

    norms = np.abs(values) if dim is None else np.linalg.norm(values, axis=1)
    return Signal(
        fn=fn,
        bound=float(np.max(norms)) if bound is None else float(bound),
        dim=dim,
        name=name,
        descriptor={
            "kind": "table",
            "dim": dim,
            "times": times.tolist(),
            "values": [_jsonable_number(v) for v in np.ravel(values)] if dim is None
            else [[_jsonable_number(v) for v in row] for row in values],
        },
    )


def _jsonable_number(c):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


# -- builtins -------------------------------------------------------------


def constant(c: complex = 1.0) -> Signal:
    c = _complex_from(c)

    def fn(t):
        return np.full(np.shape(t), c, dtype=complex if isinstance(c, complex) else float)

    return Signal(fn, abs(c), name=f"const({c})", descriptor={"kind": "builtin", "name": "constant", "params": {"c": _jsonable_number(c)}},
                  scalar_fn=lambda t: c)


def zero() -> Signal:
    s = constant(0.0)
    return Signal(s.fn, 0.0, name="zero", descriptor={"kind": "builtin", "name": "zero", "params": {}},
                  scalar_fn=lambda t: 0.0)


def exp_i(omega: float = 1.0) -> Signal:
    """``t -> exp(i omega t)``."""
    return Signal(
        lambda t: np.exp(1j * omega * t),
        1.0,
        name=f"exp(i{omega:g}t)",
        descriptor={"kind": "builtin", "name": "exp_i", "params": {"omega": omega}},
    )


def sinusoid(omega: float = 1.0, phase: float = 0.0, amplitude: float = 1.0) -> Signal:
    """``t -> amplitude * sin(omega t + phase)``."""
    return Signal(
        lambda t: amplitude * np.sin(omega * t + phase),
        abs(amplitude),
        name=f"sin({omega:g}t)",
        descriptor={"kind": "builtin", "name": "sin", "params": {"omega": omega, "phase": phase, "amplitude": amplitude}},
    )


def trig_polynomial(frequencies, coefficients) -> Signal:
    """``t -> sum_k c_k exp(i w_k t)``."""
    w = np.asarray(frequencies, dtype=float)
    c = np.array([_complex_from(v) for v in np.atleast_1d(np.asarray(coefficients, dtype=object)).tolist()]
                 if not isinstance(coefficients, np.ndarray) else coefficients, dtype=complex)
    if w.shape != c.shape:
        raise ValueError("frequencies and coefficients must have equal length")

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * np.multiply.outer(t, w)) @ c

    return Signal(
        fn,
        float(np.sum(np.abs(c))),
        name="trig",
        descriptor={"kind": "builtin", "name": "trig", "params": {
            "frequencies": w.tolist(), "coefficients": [_jsonable_number(v) for v in c]}},
    )


def _counterexample_builtins() -> dict[str, Callable[..., Signal]]:
    from . import counterexamples as cx

    return {
        "log_sin": cx.log_sin_signal,
        "lb_sin": cx.lb_sin_signal,
        "g_F": cx.g_F_signal,
        "power16_h": cx.h_signal,
        "dyadic_bumps": cx.dyadic_bumps_signal,
    }


BUILTINS: dict[str, Callable[..., Signal]] = {
    "constant": constant,
    "zero": zero,
    "exp_i": exp_i,
    "sin": sinusoid,
    "trig": trig_polynomial,
}


def make_signal(spec: dict[str, Any]) -> Signal:
    """Build a signal from a descriptor mapping.

    Accepts ``{"kind": "builtin", "name": ..., "params": {...}}`` (``kind``
    may be omitted), ``{"kind": "combo", "terms": [{"coeff", "signal"}]}``,
    ``{"kind": "table", "times", "values"}`` and ``{"kind": "shift", "tau", "of"}``.
    """
    kind = spec.get("kind", "builtin")
    if kind == "builtin":
        name = spec.get("name")
        registry = {**BUILTINS, **_counterexample_builtins()}
        if name not in registry:
            raise KeyError(f"unknown builtin signal {name!r}; known: {sorted(registry)}")
        return registry[name](**dict(spec.get("params", {})))
    if kind == "combo":
        terms = spec.get("terms", [])
        coeffs = [_complex_from(t.get("coeff", 1.0)) for t in terms]
        return linear_combination(coeffs, [make_signal(t["signal"]) for t in terms])
    if kind == "table":
        # scalar tables hold numbers or (re, im) pairs; vector tables hold rows
        vals = spec["values"]
        if spec.get("dim") is None:
            return tabulated(spec["times"], np.array([_complex_from(v) for v in vals]))
        rows = [[_complex_from(v) for v in row] for row in vals]
        return tabulated(spec["times"], np.array(rows))
    if kind == "shift":
        return make_signal(spec["of"]).shift(spec["tau"])
    raise KeyError(f"unknown signal kind {kind!r}")


def _complex_from(v) -> complex | float:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex number must be a (re, im) pair, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return float(v) if not isinstance(v, complex) else v


def is_exact_number(t) -> bool:
    return isinstance(t, (int, Fraction)) and not isinstance(t, bool)


def finite_or_raise(t) -> None:
    if not is_exact_number(t) and not math.isfinite(float(t)):
        raise ValueError(f"time must be finite, got {t}")
