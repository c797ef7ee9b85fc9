"""Probe builtin signals against the default family bank and tabulate the verdicts."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

from apsplit import wap
from apsplit.signals import make_signal


@dataclass
class BankConfig:
    signals: list[dict] = field(default_factory=lambda: [
        {"name": "log_sin"},
        {"name": "lb_sin"},
        {"name": "power16_h"},
        {"name": "sin", "params": {"omega": 1.0}},
        {"name": "trig", "params": {"frequencies": [1.0, 1.4142135623730951], "coefficients": [0.5, 0.5]}},
    ])
    tol: float = 1e-6
    separation: float = 1e-2
    out: Path = Path("out/wap_bank.csv")


def main(cfg: BankConfig) -> int:
    rows = []
    bank = wap.default_bank()
    for spec in cfg.signals:
        sig = make_signal(spec)
        for famA, famB in bank:
            rep = wap.double_limit_probe(sig, famA, famB, cfg.tol, cfg.separation)
            rows.append({"signal": spec["name"], "famA": famA.label(), "famB": famB.label(),
                         "nu": rep.nu, "mu": rep.mu, "discrepancy": rep.discrepancy, "verdict": rep.verdict})
        verdict = wap.wap_verdict(sig, bank, tol=cfg.tol, separation=cfg.separation)
        print(f"{spec['name']:<12}{verdict.verdict}")
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {cfg.out}")
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=BankConfig.out)
    sys.exit(main(BankConfig(out=p.parse_args().out)))
