"""Counterexample functions and the reproductions of their limit claims.

The functions here are evaluated exactly where integer structure matters:
``g_F`` and ``h`` accept Python ``int`` / ``Fraction`` arguments and decide
membership of the nearest integer in ``F`` by integer arithmetic, so sums
such as ``16**61 + 16**4`` are never rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .signals import Signal, is_exact_number
from .wap import DoubleLimitReport, SequenceFamily, double_limit_probe, iterated_limits

# -- scalar functions -----------------------------------------------------


def f_log_sin(t):
    """``sin(ln(|t| + 1))``; even, bounded by 1."""
    if is_exact_number(t):
        return math.sin(math.log(abs(t) + 1))
    return np.sin(np.log1p(np.abs(t)))


def tent_phi(s):
    """Tent of height 1 and radius 1/4: ``4 (1/4 - s)`` on ``[0, 1/4]``, else 0."""
    if is_exact_number(s):
        if s < 0:
            raise ValueError(f"tent argument must be >= 0, got {s}")
        return float(4 * (Fraction(1, 4) - s)) if s <= Fraction(1, 4) else 0.0
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("tent argument must be >= 0")
    out = np.where(s <= 0.25, 4.0 * (0.25 - s), 0.0)
    return out[()] if out.ndim == 0 else out


def _power16_exponent(d: int) -> int | None:
    if d <= 0 or d & (d - 1):
        return None
    e = d.bit_length() - 1
    return e // 4 if e % 4 == 0 else None


def in_F(k: int) -> bool:
    """Membership of a natural number in ``F = (E ∪ -E) ∩ N``.

    ``E = {16^n ± 16^m : 0 <= m <= n}``.  For each ``n`` with ``16^n`` not
    exceeding ``2k + 1`` we check whether ``k - 16^n`` or ``16^n - k`` is a
    power ``16^m`` with ``m <= n``.  ``-E ∩ N = {0}``, already in ``E``.
    """
    k = int(k)
    if k < 0:
        return False
    if k == 0:
        return True
    n, p = 0, 1
    while p <= 2 * k + 1:
        for d in (k - p, p - k):
            m = _power16_exponent(d)
            if m is not None and m <= n:
                return True
        n += 1
        p *= 16
    return False


def brute_force_E(n_max: int) -> set[int]:
    """All of ``{16^n ± 16^m : m <= n <= n_max}`` that are >= 0."""
    out = set()
    for n in range(n_max + 1):
        for m in range(n + 1):
            out.add(16**n + 16**m)
            out.add(16**n - 16**m)
    return out


@lru_cache(maxsize=1)
def _F_table() -> np.ndarray:
    # every element of F below 2**62, for vectorized float evaluation
    limit = 2**62
    return np.array(sorted(k for k in brute_force_E(16) if k < limit), dtype=np.int64)


def _nearest_int(t) -> int:
    if isinstance(t, int):
        return t
    if isinstance(t, Fraction):
        return round(t)
    return int(round(float(t)))


def g_F(t):
    """``sum_{k ∈ F} φ(|t - k|)``; at most one term is nonzero."""
    if is_exact_number(t) or isinstance(t, float):
        k = _nearest_int(t)
        dist = abs(Fraction(t) - k) if is_exact_number(t) else abs(float(t) - k)
        if dist > 0.25 or not in_F(k):
            return 0.0
        return tent_phi(dist if is_exact_number(dist) else float(dist))
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    small = np.abs(t) < 2.0**62
    ts = t[small]
    k = np.rint(ts)
    dist = np.abs(ts - k)
    table = _F_table()
    idx = np.clip(np.searchsorted(table, k.astype(np.int64)), 0, len(table) - 1)
    member = (table[idx] == k.astype(np.int64)) & (k >= 0)
    out[small] = np.where(member & (dist <= 0.25), 4.0 * (0.25 - dist), 0.0)
    for i in np.flatnonzero(~small.ravel()):
        out.flat[i] = g_F(float(t.flat[i]))
    return out[()] if out.ndim == 0 else out


def _lb1p(t) -> float:
    """``log2(|t| + 1)`` evaluated without rounding ``|t| + 1`` first."""
    if isinstance(t, int):
        return math.log2(abs(t) + 1)
    if isinstance(t, Fraction):
        a = abs(t) + 1
        return math.log2(a.numerator) - math.log2(a.denominator)
    return math.log1p(abs(float(t))) / math.log(2)


def f_lb(t):
    """``sin(π/8 · lb(|t| + 1))`` with ``lb`` the binary logarithm."""
    if is_exact_number(t) or isinstance(t, float):
        return math.sin(math.pi / 8 * _lb1p(t))
    t = np.asarray(t, dtype=float)
    return np.sin(np.pi / 8 * np.log1p(np.abs(t)) / np.log(2))


def h(t):
    """``g_F(t) · f_lb(t)``."""
    if is_exact_number(t) or isinstance(t, float):
        g = g_F(t)
        return g * f_lb(t) if g else 0.0
    return g_F(t) * f_lb(t)


def bump_support(n: int) -> tuple[int, int]:
    """Support ``[2^{2n+1}, 2^{2(n+1)}]`` of the n-th bump (n >= 2)."""
    return 2 ** (2 * n + 1), 2 ** (2 * (n + 1))


def bump(n: int, t):
    """Unit-slope ramps up on ``[a, a+1]``, plateau 1, ramp down on ``[b-1, b]``."""
    if n < 2:
        return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
    a, b = bump_support(n)
    if is_exact_number(t):
        return float(max(0, min(1, t - a, b - t)))
    t = np.asarray(t, dtype=float)
    out = np.clip(np.minimum(t - a, b - t), 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def dyadic_bump_vector(t, N: int) -> np.ndarray:
    """The ``l^2``-valued bump signal truncated to coordinates ``1..N``.

    Entry ``n - 1`` of the result carries ``h_n(t)``; supports are disjoint,
    so at most one entry is nonzero.
    """
    if N < 2:
        raise ValueError(f"truncation N must be >= 2, got {N}")
    if is_exact_number(t):
        out = np.zeros(N)
        for n in range(2, N + 1):
            out[n - 1] = bump(n, t)
        return out
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (N,))
    for n in range(2, N + 1):
        out[..., n - 1] = bump(n, t)
    return out


# -- signal wrappers ------------------------------------------------------


def log_sin_signal() -> Signal:
    return Signal(f_log_sin, 1.0, name="sin(ln(|t|+1))",
                  descriptor={"kind": "builtin", "name": "log_sin", "params": {}}, scalar_fn=f_log_sin)


def lb_sin_signal() -> Signal:
    return Signal(f_lb, 1.0, name="sin(pi/8 lb(|t|+1))",
                  descriptor={"kind": "builtin", "name": "lb_sin", "params": {}}, scalar_fn=f_lb)


def g_F_signal() -> Signal:
    return Signal(g_F, 1.0, name="g_F", descriptor={"kind": "builtin", "name": "g_F", "params": {}}, scalar_fn=g_F)


def h_signal() -> Signal:
    return Signal(h, 1.0, name="h", descriptor={"kind": "builtin", "name": "power16_h", "params": {}}, scalar_fn=h)


def dyadic_bumps_signal(N: int = 12) -> Signal:
    return Signal(
        lambda t: dyadic_bump_vector(t, N),
        1.0,
        dim=N,
        name=f"g_N{N}",
        descriptor={"kind": "builtin", "name": "dyadic_bumps", "params": {"N": N}},
        scalar_fn=lambda t: dyadic_bump_vector(t, N),
    )


# -- reproductions --------------------------------------------------------


@dataclass
class ReproResult:
    claim_id: str
    values: dict[str, Any]
    target: Any
    deviation: float
    tolerance: float
    passed: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "values": self.values,
            "target": self.target,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "notes": list(self.notes),
        }


def repro_log_sin_shift(m_range: Sequence[int] = range(10, 41), shifts: Sequence[float] | None = None,
                        tol: float = 1e-6) -> ReproResult:
    """``f(s + exp(2mπ + π/2)) -> 1`` for every fixed shift ``s``."""
    m_values = list(m_range)
    if not m_values:
        raise ValueError("m_range is empty")
    shifts = list(np.linspace(0.0, 100.0, 101)) if shifts is None else list(shifts)
    table = {}
    worst = 0.0
    for m in m_values:
        t_m = math.exp(2 * m * math.pi + math.pi / 2)
        row = [float(f_log_sin(s + t_m)) for s in shifts]
        table[str(m)] = row
        worst = max(worst, max(1.0 - v for v in row))
    return ReproResult(
        claim_id="11.2",
        values={"shifts": [float(s) for s in shifts], "f(s+t_m)": table},
        target=1.0,
        deviation=worst,
        tolerance=tol,
        passed=worst <= tol,
    )


def power16_families(budget: int = 15, stride: int = 4) -> tuple[SequenceFamily, SequenceFamily]:
    """``t_m = 16^m`` and ``s_n = 16^{n+1}`` over stride indices ``k <= budget``."""
    top = stride * budget
    return (SequenceFamily.power16(0, top, stride=stride),
            SequenceFamily.power16_shift(0, top, stride=stride))


def repro_power16_double_limit(budget: int = 15, tol: float = 1e-4) -> ReproResult:
    """Iterated limits of ``h(s_n + t_m)``: 1 along ``n = 4k``, 0 along ``m = 4k``.

    ``budget`` bounds the stride index ``k``, so ``n, m <= 4 * budget``.
    """
    if budget < 6:
        raise ValueError("budget must allow at least 6 stride indices")
    top = 4 * budget
    notes = []

    # lim_n f(s_{4k} + t_m) = 1 for every fixed m
    n_tail = [4 * k for k in range(budget - 4, budget + 1)]
    fixed_m = list(range(0, 8))
    one_table = {str(m): [h((16 ** (n + 1)) + 16**m) for n in n_tail] for m in fixed_m}
    dev_one = max(abs(1 - v) for row in one_table.values() for v in row)

    # lim_m h(s_n + t_{4k}) = 0 for every fixed n
    m_tail = [4 * k for k in range(budget - 4, budget + 1)]
    fixed_n = list(range(0, 8))
    zero_table = {str(n): [h((16 ** (n + 1)) + 16**m) for m in m_tail] for n in fixed_n}
    dev_zero = max(abs(v) for row in zero_table.values() for v in row)

    # h = f on s_n + t_m for all m <= n: the sum lies in E
    on_E = all(g_F(16 ** (n + 1) + 16**m) == 1.0 for n in range(top + 1) for m in range(n + 2))
    # membership procedure against enumeration, on the sums and their neighbours
    enum = brute_force_E(top + 1)
    probe_points = set()
    for n in range(top + 1):
        for m in range(n + 2):
            base = 16 ** (n + 1) + 16**m
            probe_points.update((base - 1, base, base + 1))
    probe_points.update(range(0, 70000))
    membership_ok = all(in_F(k) == (k in enum) for k in probe_points if k < 16 ** (top + 1))
    if not membership_ok:
        notes.append("E-membership disagrees with enumeration")

    famA, famB = power16_families(budget)
    report = double_limit_probe(h_signal(), famA, famB, tol=1e-6, separation=1e-2)
    deviation = max(dev_one, dev_zero)
    passed = deviation <= tol and on_E and membership_ok and report.verdict == "violation"
    return ReproResult(
        claim_id="11.10",
        values={
            "lim_n f(s_4k+t_m)": one_table,
            "lim_m h(s_n+t_4k)": zero_table,
            "n_tail": n_tail,
            "m_tail": m_tail,
            "h_equals_f_on_E": on_E,
            "membership_agrees": membership_ok,
            "membership_points": len(probe_points),
            "double_limit": report.to_dict(),
        },
        target={"n_order": 1.0, "m_order": 0.0},
        deviation=deviation,
        tolerance=tol,
        passed=passed,
        notes=notes,
    )


def window_probe(N: int, weights, radius: float = 4.0, n_nodes: int = 2049):
    """Compactly supported ``L^1`` probe ``1_{[-R,R]}/(2R) · v`` with ``v`` in ``l^2_N``."""
    v = np.asarray(weights, dtype=float)
    if v.shape != (N,):
        raise ValueError(f"probe weights must have shape ({N},)")
    s = np.linspace(-radius, radius, n_nodes)
    return s, np.full(n_nodes, 1.0 / (2 * radius)), v


def translate_pairing(t: float, N: int, probe) -> float:
    """``∫ <g(s + t), φ(s)> ds`` for a window probe (trapezoid on the nodes)."""
    s, density, v = probe
    vals = dyadic_bump_vector(s + t, N) @ v
    return float(np.trapezoid(vals * density, s))


def default_probe_bank(N: int):
    geometric = 2.0 ** -np.arange(N)
    geometric /= np.linalg.norm(geometric)
    e2 = np.zeros(N)
    e2[1] = 1.0
    e5 = np.zeros(N)
    e5[min(4, N - 1)] = 1.0
    return {"e_2": window_probe(N, e2), "e_5": window_probe(N, e5), "geometric": window_probe(N, geometric)}


def repro_dyadic_bumps(N: int = 12, probes: dict | None = None, separation: float = 0.9,
                       decay_tol: float = 1e-3) -> ReproResult:
    """Double array ``<g(ω_n + t_m), e_m>`` and weak-null translate pairings."""
    if N < 8:
        raise ValueError("N must be at least 8 to form tails of length 5")
    idx = list(range(2, N + 1))

    def entry(n: int, m: int) -> float:
        t = 2 ** (2 * n) + 2 ** (2 * m + 1) + 1
        return float(dyadic_bump_vector(t, N)[m - 1])

    array = {f"{n},{m}": entry(n, m) for n in idx for m in idx}
    # ν: inner over m for fixed n ; μ: inner over n for fixed m
    nu, nu_table = iterated_limits(lambda n, m: entry(n, m), idx, idx, gap=1, K=5, tol=1e-9)
    mu, mu_table = iterated_limits(lambda m, n: entry(n, m), idx, idx, gap=1, K=5, tol=1e-9)
    gap_ok = nu is not None and mu is not None and abs(nu - mu) >= separation

    probes = default_probe_bank(N) if probes is None else probes
    decay = {}
    worst_tail = 0.0
    for name, probe in probes.items():
        row = []
        for n in idx:
            a, b = bump_support(n)
            times = [a - 2.0, a + 0.5, (a + b) / 2, b - 0.5]
            row.append(max(abs(translate_pairing(t, N, probe)) for t in times))
        decay[name] = row
        worst_tail = max(worst_tail, row[-1])
    decays = worst_tail <= decay_tol
    return ReproResult(
        claim_id="11.11",
        values={
            "array": array,
            "nu_inner_m": nu,
            "mu_inner_n": mu,
            "nu_table": nu_table,
            "mu_table": mu_table,
            "translate_pairing_sup_per_bump": decay,
        },
        target={"iterated_gap": separation, "pairing_tail": decay_tol},
        deviation=worst_tail,
        tolerance=decay_tol,
        passed=gap_ok and decays,
    )


__all__ = [
    "DoubleLimitReport",
    "ReproResult",
    "brute_force_E",
    "dyadic_bump_vector",
    "f_lb",
    "f_log_sin",
    "g_F",
    "h",
    "in_F",
    "repro_power16_double_limit",
    "repro_dyadic_bumps",
    "repro_log_sin_shift",
    "tent_phi",
]
