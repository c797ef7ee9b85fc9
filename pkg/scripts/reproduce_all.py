"""Run every registered claim and write one JSON line per claim."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from apsplit import claims
from apsplit.cli import jsonable


@dataclass
class ReproduceConfig:
    claim_ids: list[str] = field(default_factory=lambda: [c["id"] for c in claims.list_claims()])
    out: Path | None = None


def main(cfg: ReproduceConfig) -> int:
    lines = []
    failed = 0
    for cid in cfg.claim_ids:
        start = time.perf_counter()
        res = claims.run_claim(cid)
        elapsed = time.perf_counter() - start
        failed += not res.passed
        print(f"{cid:<14}{'pass' if res.passed else 'FAIL':<6}deviation={res.deviation:.3e} "
              f"tol={res.tolerance:g} ({elapsed:.2f}s)")
        lines.append(json.dumps({"claim": cid, "wall_time": round(elapsed, 6), "result": jsonable(res)},
                                sort_keys=True))
    if cfg.out is not None:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        cfg.out.write_text("\n".join(lines) + "\n")
    return 1 if failed else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--claim", action="append", help="claim id (repeatable; default: all)")
    p.add_argument("--out", type=Path, help="JSONL output file")
    a = p.parse_args()
    cfg = ReproduceConfig(out=a.out)
    if a.claim:
        cfg.claim_ids = a.claim
    sys.exit(main(cfg))
