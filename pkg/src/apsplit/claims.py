"""Registry of reproducible claims, addressable by id from the CLI.

Every runner is deterministic and returns a :class:`ReproResult`.  Claim
reproduction never depends on a user seed; randomized models inside a claim
use fixed generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import counterexamples as cx
from . import ergodic, wap
from .counterexamples import ReproResult
from .models import MatrixModel, apply
from .signals import sinusoid


@dataclass(frozen=True)
class Claim:
    claim_id: str
    title: str
    tolerance: float
    runner: Callable[[], ReproResult]


def random_bounded_model(rng: np.random.Generator, dim: int = 4, min_gap: float = 0.5) -> MatrixModel:
    """``V D V^{-1}`` with half the spectrum on ``iℝ`` (pairwise gaps ``>= min_gap``), half stable."""
    n_axis = dim - dim // 2
    while True:
        freqs = rng.uniform(-3, 3, n_axis)
        if n_axis < 2 or np.min(np.diff(np.sort(freqs))) >= min_gap:
            break
    stable = -rng.uniform(0.5, 2.0, dim - n_axis) + 1j * rng.uniform(-3, 3, dim - n_axis)
    D = np.diag(np.concatenate([1j * freqs, stable]))
    V = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    V /= np.linalg.norm(V, axis=0)
    return MatrixModel.from_generator(V @ D @ np.linalg.inv(V))


def _result(claim_id: str, values: dict, target, deviation: float, tol: float, ok: bool = True,
            notes: list[str] | None = None) -> ReproResult:
    return ReproResult(claim_id, values, target, float(deviation), tol, bool(ok and deviation <= tol), notes or [])


def mean_projection_claim() -> ReproResult:
    model = MatrixModel.from_generator(np.diag([0, 1j, -1]))
    est = ergodic.mean_ergodic_projection(model, np.ones(3))
    again = ergodic.mean_ergodic_projection(model, est.value)
    dev = float(np.linalg.norm(est.value - np.array([1, 0, 0])))
    gen = est.diagnostics["generator_residual"]
    idem = float(np.linalg.norm(again.value - est.value))
    ok = est.converged and gen <= 1e-5 and idem <= 1e-5
    return _result("10.1", {"Qx": est.value, "generator_residual": gen, "idempotence": idem,
                            "estimate": est.to_dict()}, [1, 0, 0], dev, 1e-6, ok)


def split_claim() -> ReproResult:
    model = MatrixModel.from_generator(np.diag([0, 1j, -1]))
    x = np.ones(3, dtype=complex)
    rep = ergodic.jdlg_split(model, x)
    dev = float(np.linalg.norm(rep.x_a - np.array([1, 1, 0])))
    inv = {}
    for t in (0.3, 1.0, 7.0):
        moved = ergodic.jdlg_split(model, apply(model, t, x))
        inv[str(t)] = float(np.linalg.norm(moved.x_a - apply(model, t, rep.x_a)))
    worst_inv = max(inv.values())
    return _result("7.10", {"split": rep.to_dict(), "translation_invariance": inv}, [1, 1, 0],
                   max(dev, worst_inv), 1e-4, rep.converged)


def flight_decay_claim() -> ReproResult:
    model = MatrixModel.from_generator(np.diag([-1.0, -2.0]))
    exact = (1 - math.exp(-1000)) / 1000
    means = {}
    for j, probe in enumerate(np.eye(2)):
        means[f"e_{j + 1}"] = [ergodic.flight_mean(model, probe, probe, T) for T in (1e2, 1e3, 1e4)]
    rel = abs(means["e_1"][1] - exact) / exact
    monotone = all(a > b for row in means.values() for a, b in zip(row, row[1:]))
    return _result("7.12-decay", {"T": [1e2, 1e3, 1e4], "means": means, "closed_form_T1000": exact},
                   exact, rel, 0.1, monotone)


def log_sin_shift_claim() -> ReproResult:
    return cx.repro_log_sin_shift()


def log_sin_double_limit_claim() -> ReproResult:
    rep = wap.double_limit_probe(cx.log_sin_signal(), wap.SequenceFamily.exponential(math.pi / 2),
                                 wap.SequenceFamily.exponential(3 * math.pi / 2))
    if rep.nu is None or rep.mu is None:
        return _result("11.5", {"report": rep.to_dict()}, {"nu": 1, "mu": -1}, math.inf, 1e-6, False,
                       ["iterated limit inconclusive"])
    dev = max(abs(rep.nu - 1), abs(rep.mu + 1))
    return _result("11.5", {"report": rep.to_dict()}, {"nu": 1, "mu": -1}, dev, 1e-6, rep.verdict == "violation")


def power16_claim() -> ReproResult:
    return cx.repro_power16_double_limit()


def dyadic_bump_claim() -> ReproResult:
    return cx.repro_dyadic_bumps()


def ap_controls_claim() -> ReproResult:
    f = sinusoid(1.0) + sinusoid(math.sqrt(2))
    verdict = wap.wap_verdict(f)
    coeffs = {}
    devs = []
    for w, target in ((1.0, 0.5), (math.sqrt(2), 0.5), (0.7, 0.0)):
        est = wap.bohr_coefficient(f, w)
        coeffs[f"{w:.12g}"] = {"modulus": abs(est.value), "target": target, "converged": est.converged}
        devs.append(abs(abs(est.value) - target))
    return _result("5.7-controls", {"wap": verdict.to_dict(), "bohr": coeffs}, "no_violation_found",
                   max(devs), 1e-3, verdict.verdict == "no_violation_found")


def trig_regularity_claim() -> ReproResult:
    rng = np.random.default_rng(20240611)
    model = random_bounded_model(rng)
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    y = rng.normal(size=4) + 1j * rng.normal(size=4)
    rep = ergodic.jdlg_split(model, x)
    c = np.array(rep.coefficients(y))
    w = np.array(rep.frequencies)
    t = np.linspace(0, 100, 1001)
    orbit = np.array([np.vdot(y, apply(model, ti, rep.x_a)) for ti in t])
    trig = np.exp(1j * np.outer(t, w)) @ c
    dev = float(np.max(np.abs(orbit - trig)))
    return _result("8.3-trig", {"frequencies": rep.frequencies, "coefficients": list(c), "sup_error": dev},
                   "trigonometric polynomial", dev, 1e-4, rep.converged)


_CLAIMS = [
    Claim("10.1", "mean ergodic projection onto the fixed space", 1e-6, mean_projection_claim),
    Claim("7.10", "unimodular spectral split and its translation invariance", 1e-4, split_claim),
    Claim("7.12-decay", "absolute Cesaro means of a flight vector decay", 0.1, flight_decay_claim),
    Claim("11.2", "log-sine translates tend to 1 along exp(2m pi + pi/2)", 1e-6, log_sin_shift_claim),
    Claim("11.5", "log-sine iterated double limits 1 and -1", 1e-6, log_sin_double_limit_claim),
    Claim("11.10", "power-of-16 bump signal: iterated limits 1 and 0", 1e-4, power16_claim),
    Claim("11.11", "dyadic bump signal: iterated limits differ, translates weak-null", 1e-3, dyadic_bump_claim),
    Claim("5.7-controls", "almost periodic controls: no violation, Bohr moduli", 1e-3, ap_controls_claim),
    Claim("8.3-trig", "orbits of the almost periodic part are trigonometric polynomials", 1e-4,
          trig_regularity_claim),
]

REGISTRY: dict[str, Claim] = {c.claim_id: c for c in _CLAIMS}


def list_claims() -> list[dict[str, object]]:
    return [{"id": c.claim_id, "title": c.title, "tolerance": c.tolerance} for c in _CLAIMS]


def run_claim(claim_id: str) -> ReproResult:
    if claim_id not in REGISTRY:
        raise KeyError(f"unknown claim {claim_id!r}; known: {list(REGISTRY)}")
    return REGISTRY[claim_id].runner()
