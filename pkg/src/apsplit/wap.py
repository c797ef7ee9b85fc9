"""Probes for Eberlein weak almost periodicity of scalar signals.

Refutation only: a double-limit violation is a witness of non-membership in
the weakly almost periodic functions; failing to find one proves nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .averaging import (DEFAULT_H, TAIL_K, HorizonSchedule, LimitEstimate, schedule_limit,
                        simpson, tail_limit)
from .signals import Signal

DEFAULT_SEPARATION = 1e-2
DEFAULT_GAP = 5

#: Largest exponent allowed in an exponential family, ``2 m π + τ``.
EXP_CAP = 700.0
#: Largest power of 16 allowed (``16^63 = 2^252``).
POWER16_CAP = 63

KINDS = ("exponential", "power16", "power16_shift", "arithmetic", "explicit")


@dataclass(frozen=True)
class SequenceFamily:
    """Index-to-time sequence ``m -> t_m`` over ``m_min..m_max`` (step ``stride``).

    * ``exponential``: ``exp(2 m π + tau)``
    * ``power16``: ``16**m`` (exact integer)
    * ``power16_shift``: ``16**(m + 1)`` (exact integer)
    * ``arithmetic``: ``a + m d``
    * ``explicit``: ``values[m]``
    """

    kind: str
    m_min: int = 0
    m_max: int = 40
    stride: int = 1
    tau: float = 0.0
    a: float = 0.0
    d: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.kind == "explicit":
            if self.m_max >= len(self.values):
                raise ValueError(f"explicit family index bound m_max={self.m_max} exceeds its {len(self.values)} values")
        if self.m_min > self.m_max:
            raise ValueError(f"empty index range [{self.m_min}, {self.m_max}]")
        if self.m_min < 0:
            raise ValueError("indices must be >= 0")
        if self.kind == "exponential" and 2 * self.m_max * math.pi + self.tau > EXP_CAP:
            raise OverflowError(
                f"exponential family index bound m_max={self.m_max} gives exponent "
                f"{2 * self.m_max * math.pi + self.tau:.1f} > {EXP_CAP:g}"
            )
        if self.kind == "power16" and self.m_max > POWER16_CAP:
            raise OverflowError(f"power16 family index bound m_max={self.m_max} exceeds {POWER16_CAP}")
        if self.kind == "power16_shift" and self.m_max + 1 > POWER16_CAP:
            raise OverflowError(f"power16_shift family index bound m_max={self.m_max} exceeds {POWER16_CAP - 1}")
        vals = [self.value(m) for m in self.indices()]
        if any(not math.isfinite(float(v)) for v in vals):
            raise OverflowError(f"{self.kind} family has non-finite values below index bound m_max={self.m_max}")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"{self.kind} family is not strictly increasing on its index range")

    @classmethod
    def exponential(cls, tau: float, m_min: int = 0, m_max: int = 40, stride: int = 1) -> "SequenceFamily":
        return cls("exponential", m_min, m_max, stride, tau=tau)

    @classmethod
    def power16(cls, m_min: int = 0, m_max: int = 60, stride: int = 1) -> "SequenceFamily":
        return cls("power16", m_min, m_max, stride)

    @classmethod
    def power16_shift(cls, m_min: int = 0, m_max: int = 60, stride: int = 1) -> "SequenceFamily":
        return cls("power16_shift", m_min, m_max, stride)

    @classmethod
    def arithmetic(cls, a: float, d: float, m_min: int = 0, m_max: int = 200, stride: int = 1) -> "SequenceFamily":
        return cls("arithmetic", m_min, m_max, stride, a=a, d=d)

    @classmethod
    def explicit(cls, values: Sequence, stride: int = 1) -> "SequenceFamily":
        return cls("explicit", 0, len(values) - 1, stride, values=tuple(values))

    def indices(self) -> list[int]:
        return list(range(self.m_min, self.m_max + 1, self.stride))

    def value(self, m: int):
        if self.kind == "exponential":
            return math.exp(2 * m * math.pi + self.tau)
        if self.kind == "power16":
            return 16**m
        if self.kind == "power16_shift":
            return 16 ** (m + 1)
        if self.kind == "arithmetic":
            return self.a + m * self.d
        return self.values[m]

    def label(self) -> str:
        extra = {"exponential": f"tau={self.tau:.6g}", "arithmetic": f"a={self.a:.6g},d={self.d:.6g}"}.get(self.kind, "")
        s = f"{self.kind}({extra})[{self.m_min}..{self.m_max}"
        return s + (f":{self.stride}]" if self.stride != 1 else "]")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "m_min": self.m_min, "m_max": self.m_max, "stride": self.stride}
        if self.kind == "exponential":
            out["tau"] = self.tau
        elif self.kind == "arithmetic":
            out.update(a=self.a, d=self.d)
        elif self.kind == "explicit":
            out["values"] = list(self.values)
        return out

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "SequenceFamily":
        spec = dict(spec)
        kind = spec.pop("kind")
        if kind == "explicit":
            return cls.explicit(spec["values"], stride=int(spec.get("stride", 1)))
        return cls(kind, **{k: v for k, v in spec.items()})


@dataclass
class DoubleLimitReport:
    """Iterated limits of ``f(t_m + s_n)`` in both orders.

    ``nu = lim_n lim_m`` (inner over family A), ``mu = lim_m lim_n``.
    """

    nu: complex | None
    mu: complex | None
    discrepancy: float | None
    verdict: str
    nu_table: list[dict[str, Any]]
    mu_table: list[dict[str, Any]]
    tol: float
    separation: float
    families: tuple[str, str] = ("", "")

    def to_dict(self) -> dict[str, Any]:
        return {
            "nu": self.nu,
            "mu": self.mu,
            "discrepancy": self.discrepancy,
            "verdict": self.verdict,
            "nu_table": self.nu_table,
            "mu_table": self.mu_table,
            "tol": self.tol,
            "separation": self.separation,
            "families": list(self.families),
        }


def iterated_limits(pair: Callable[[Any, Any], Any], outer: Sequence, inner: Sequence,
                    gap: int | None = DEFAULT_GAP, K: int = TAIL_K, tol: float = 1e-6):
    """``lim_outer lim_inner pair(outer, inner)`` by the tail rule.

    For outer index ``o`` the inner sequence runs over ``i >= o + gap``.
    Returns ``(limit or None, table)``; the outer limit needs the last ``K``
    outer indices with a full inner tail to all have converged inner limits.
    """
    table = []
    outer_values = []
    for o in outer:
        idx = [i for i in inner if gap is None or i >= o + gap]
        if len(idx) < K:
            table.append({"outer": o, "inner_terms": len(idx), "limit": None})
            continue
        # the tail rule only looks at the last K terms
        lim = tail_limit([pair(o, i) for i in idx[-K:]], K, tol)
        table.append({"outer": o, "inner_terms": len(idx), "limit": lim})
        outer_values.append(lim)
    if len(outer_values) < K or any(v is None for v in outer_values[-K:]):
        return None, table
    return tail_limit(outer_values[-K:], K, tol), table


def double_limit_probe(signal: Signal, famA: SequenceFamily, famB: SequenceFamily,
                       tol: float = 1e-6, separation: float = DEFAULT_SEPARATION,
                       gap: int | None = DEFAULT_GAP, K: int = TAIL_K) -> DoubleLimitReport:
    """Compare ``lim_n lim_m f(t_m + s_n)`` with ``lim_m lim_n f(t_m + s_n)``.

    ``t_m`` comes from ``famA`` and ``s_n`` from ``famB``.  The verdict is
    ``violation`` only when both iterated limits exist by the tail rule and
    differ by more than ``separation``.
    """
    if signal.dim is not None:
        raise ValueError("double_limit_probe needs a scalar signal")
    tA = {m: famA.value(m) for m in famA.indices()}
    tB = {n: famB.value(n) for n in famB.indices()}
    cache: dict[tuple[int, int], Any] = {}
    if signal.scalar_fn is None or all(isinstance(v, float) for v in (*tA.values(), *tB.values())):
        # no exact path to honour: one vectorized evaluation of the whole grid
        sums = np.add.outer(np.array(list(tA.values()), dtype=object), np.array(list(tB.values()), dtype=object))
        grid = np.asarray(signal(sums.astype(float)), dtype=complex)
        for i, m in enumerate(tA):
            for j, n in enumerate(tB):
                cache[(m, n)] = complex(grid[i, j])

    def f(m, n):
        key = (m, n)
        if key not in cache:
            cache[key] = complex(signal(tA[m] + tB[n]))
        return cache[key]

    nu, nu_table = iterated_limits(lambda n, m: f(m, n), famB.indices(), famA.indices(), gap, K, tol)
    mu, mu_table = iterated_limits(lambda m, n: f(m, n), famA.indices(), famB.indices(), gap, K, tol)
    if nu is None or mu is None:
        disc, verdict = None, "inconclusive"
    else:
        disc = float(abs(nu - mu))
        verdict = "violation" if disc > separation else "consistent"
    return DoubleLimitReport(nu, mu, disc, verdict, nu_table, mu_table, tol, separation,
                             (famA.label(), famB.label()))


def default_bank() -> list[tuple[SequenceFamily, SequenceFamily]]:
    """Family pairs covering the named sequences plus arithmetic controls."""
    taus = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
    bank = [(SequenceFamily.exponential(a), SequenceFamily.exponential(b)) for a in taus for b in taus]
    for stride in (1, 4):
        bank.append((SequenceFamily.power16(0, 60, stride), SequenceFamily.power16_shift(0, 60, stride)))
    bank.append((SequenceFamily.arithmetic(0, 1), SequenceFamily.arithmetic(0.0, math.sqrt(2))))
    return bank


@dataclass
class WapVerdict:
    verdict: str
    counterexample: tuple[SequenceFamily, SequenceFamily, DoubleLimitReport] | None
    reports: list[DoubleLimitReport] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        ce = None
        if self.counterexample is not None:
            a, b, rep = self.counterexample
            ce = {"famA": a.to_dict(), "famB": b.to_dict(), "report": rep.to_dict()}
        return {
            "verdict": self.verdict,
            "counterexample": ce,
            "pairs_probed": len(self.reports),
            "pair_verdicts": [r.verdict for r in self.reports],
        }


def wap_verdict(signal: Signal, bank: list[tuple[SequenceFamily, SequenceFamily]] | None = None,
                budget: int | None = None, tol: float = 1e-6,
                separation: float = DEFAULT_SEPARATION) -> WapVerdict:
    """Search a family bank for a double-limit witness against weak almost periodicity.

    ``budget`` caps the number of pairs probed.  ``no_violation_found`` is
    not a proof of weak almost periodicity.
    """
    bank = default_bank() if bank is None else list(bank)
    if not bank:
        raise ValueError("family bank is empty")
    reports = []
    for famA, famB in bank[: budget if budget is not None else len(bank)]:
        rep = double_limit_probe(signal, famA, famB, tol, separation)
        reports.append(rep)
        if rep.verdict == "violation":
            return WapVerdict("violation_found", (famA, famB, rep), reports)
    return WapVerdict("no_violation_found", None, reports)


def bohr_coefficient(signal: Signal, omega: float, schedule: HorizonSchedule | None = None,
                     tol: float = 1e-4, h: float = DEFAULT_H, max_refine: int = 4) -> LimitEstimate:
    """Bohr–Fourier coefficient ``lim_r (1/r) ∫_0^r exp(-iωt) f(t) dt``.

    The integral over ``[0, r_k]`` is accumulated segment by segment along
    the schedule.  Each segment uses composite Simpson at ``h`` and ``h/2``;
    ``h`` is halved while the two disagree by more than ``tol/10`` of the
    horizon-normalized value.
    """
    if signal.dim is not None:
        raise ValueError("bohr_coefficient needs a scalar signal")
    schedule = schedule or HorizonSchedule()
    state = {"a": 0.0, "total": 0j, "h": float(h)}

    def integrand(t):
        return np.exp(-1j * omega * t) * signal(t)

    def evaluate(r):
        a = state["a"]
        for _ in range(max_refine + 1):
            fine, coarse = simpson(integrand, a, r, state["h"])
            err = abs(fine - coarse) / 15
            if abs(fine - coarse) <= tol / 10 * r:
                break
            state["h"] /= 2
        state["total"] += fine
        state["a"] = r
        return complex(state["total"] / r), err / r

    return schedule_limit(evaluate, schedule, tol)


@dataclass
class APProbeReport:
    epsilon_periods: list[float]
    max_gap: float
    relatively_dense_evidence: bool
    eps: float
    horizon: float
    window: tuple[float, float]
    dtau: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon_periods": self.epsilon_periods,
            "max_gap": self.max_gap,
            "relatively_dense_evidence": self.relatively_dense_evidence,
            "eps": self.eps,
            "horizon": self.horizon,
            "window": list(self.window),
            "dtau": self.dtau,
        }


def _sup_distance(signal: Signal, u: np.ndarray, base: np.ndarray, taus: np.ndarray) -> np.ndarray:
    vals = signal(u[None, :] + taus[:, None])
    diff = np.abs(vals - base[None, ...])
    if signal.dim is not None:
        diff = np.linalg.norm(vals - base[None, ...], axis=-1)
    return diff.max(axis=1)


def ap_probe(signal: Signal, eps: float, horizon: float, gap_bound: float,
             window: tuple[float, float] = (0.0, 100.0), n_window: int = 1024,
             dtau: float | None = None, n_coarse: int = 32, chunk: int = 4096) -> APProbeReport:
    """Search ``[0, horizon]`` for Bohr ε-almost periods.

    ``τ`` qualifies when ``sup_{t ∈ window} |f(t + τ) - f(t)| <= eps`` on
    ``n_window`` sample points (after a cheap coarse filter).  Consecutive
    qualifying grid points form one cluster, represented by its best ``τ``.
    Evidence of relative density: every gap between representatives, and
    from the last one to ``horizon``, is at most ``gap_bound``.
    """
    if eps <= 0 or not math.isfinite(horizon) or horizon <= 0:
        raise ValueError("need eps > 0 and a finite positive horizon")
    dtau = horizon / 1e6 if dtau is None else float(dtau)
    taus = np.arange(0.0, horizon + 0.5 * dtau, dtau)
    u_c = np.linspace(window[0], window[1], n_coarse)
    u_f = np.linspace(window[0], window[1], n_window)
    base_c, base_f = signal(u_c), signal(u_f)

    keep = []
    for start in range(0, len(taus), chunk):
        block = taus[start:start + chunk]
        ok = np.flatnonzero(_sup_distance(signal, u_c, base_c, block) <= eps) + start
        if ok.size:
            fine = _sup_distance(signal, u_f, base_f, taus[ok])
            keep.extend(zip(ok[fine <= eps].tolist(), fine[fine <= eps].tolist()))

    reps: list[float] = []
    cluster: list[tuple[int, float]] = []
    for item in keep + [(-10, 0.0)]:
        if cluster and item[0] != cluster[-1][0] + 1:
            best = min(cluster, key=lambda c: c[1])
            reps.append(float(taus[best[0]]))
            cluster = []
        cluster.append(item)
    points = [0.0] + [r for r in reps if r > 0] + [float(horizon)]
    max_gap = float(np.max(np.diff(points)))
    return APProbeReport(reps, max_gap, max_gap <= gap_bound, eps, horizon, tuple(window), dtau)
