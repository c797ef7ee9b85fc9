"""Command-line batch front-end.

Each invocation runs one job and writes one JSON record per line.  Exit codes:
0 success, 1 a claim or check failed, 2 configuration error, 3 results were
inconclusive (and none failed).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from typing import Any

import numpy as np

from . import __version__, claims, ergodic, wap
from .averaging import HorizonSchedule
from .config import ConfigError, JobConfig, parse_vector
from . import config as cfgmod
from .models import (DiagonalSequenceModel, MatrixModel, TranslationModel, matrix_orbit, orbit_function,
                     orbit_precompactness_probe)
from .signals import make_signal

log = logging.getLogger("apsplit")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3
INCONCLUSIVE = "inconclusive"


def jsonable(obj: Any) -> Any:
    """JSON-ready copy; complex numbers become ``[re, im]``, non-finite floats ``"inconclusive"``."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else INCONCLUSIVE
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return INCONCLUSIVE
        return [z.real, z.imag]
    return obj


def build_model(spec: dict[str, Any]):
    variant = spec.get("variant", "matrix")
    if variant == "matrix":
        dim = spec["dim"]
        A = np.array([cfgmod.parse_complex(e) for e in spec["entries"]]).reshape(dim, dim)
        try:
            return MatrixModel.from_generator(A)
        except ValueError as exc:
            raise ConfigError(str(exc), "model") from None
    if variant == "translation":
        return TranslationModel(domain=spec.get("domain", "R"))
    return DiagonalSequenceModel(domain=spec.get("domain", "R"), N=spec.get("N", 12))


def _schedule(cfg: JobConfig) -> HorizonSchedule:
    return HorizonSchedule(**cfg.schedule)


def _limit_status(est) -> str:
    return "pass" if est.converged else INCONCLUSIVE


def _run_split(cfg: JobConfig) -> list[dict[str, Any]]:
    model = build_model(cfg.model)
    rep = ergodic.jdlg_split(model, parse_vector(cfg.x), tol=cfg.tol, schedule=_schedule(cfg),
                             kernel=cfg.kernel or "smooth", h=cfg.h)
    if not rep.converged:
        status = INCONCLUSIVE
    else:
        status = "pass" if rep.flight_verified else "fail"
    return [{"operation": "jdlg_split", "status": status, "report": rep}]


def _run_mean(cfg: JobConfig) -> list[dict[str, Any]]:
    model = build_model(cfg.model)
    x = parse_vector(cfg.x)
    kernel = cfg.kernel or "cesaro"
    if cfg.omega == 0:
        est = ergodic.mean_ergodic_projection(model, x, _schedule(cfg), cfg.tol, cfg.h, kernel)
        op = "mean_ergodic_projection"
    else:
        est = ergodic.weighted_mean(model, x, cfg.omega, _schedule(cfg), cfg.tol, cfg.h, kernel)
        op = "weighted_mean"
    return [{"operation": op, "status": _limit_status(est), "omega": cfg.omega, "estimate": est}]


def _run_wap(cfg: JobConfig) -> list[dict[str, Any]]:
    signal = make_signal(cfg.signal)
    out = []
    if cfg.families:
        for pair in cfg.families:
            famA = wap.SequenceFamily.from_dict(pair["a"])
            famB = wap.SequenceFamily.from_dict(pair["b"])
            rep = wap.double_limit_probe(signal, famA, famB, tol=cfg.tol, separation=cfg.separation)
            status = INCONCLUSIVE if rep.verdict == INCONCLUSIVE else "pass"
            out.append({"operation": "double_limit_probe", "status": status, "report": rep})
    else:
        verdict = wap.wap_verdict(signal, tol=cfg.tol, separation=cfg.separation)
        out.append({"operation": "wap_verdict", "status": "pass", "report": verdict})
    for w in cfg.bohr or []:
        est = wap.bohr_coefficient(signal, float(w), _schedule(cfg))
        out.append({"operation": "bohr_coefficient", "status": _limit_status(est), "omega": float(w),
                    "estimate": est})
    if cfg.ap:
        ap = dict(cfg.ap)
        rep = wap.ap_probe(signal, float(ap.get("eps", 0.1)), float(ap.get("horizon", 1e3)),
                           float(ap.get("gap_bound", 100.0)))
        out.append({"operation": "ap_probe", "status": "pass", "report": rep})
    return out


def _run_repro(cfg: JobConfig) -> list[dict[str, Any]]:
    ids = cfg.claims or [c["id"] for c in claims.list_claims()]
    out = []
    for cid in ids:
        try:
            res = claims.run_claim(cid)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0]), "claims") from None
        out.append({"operation": "repro", "claim": cid, "status": "pass" if res.passed else "fail", "result": res})
    return out


def _orbit_times(cfg: JobConfig) -> np.ndarray:
    spec = {"start": 0.0, "stop": 10.0, "num": 101, **(cfg.times or {})}
    if int(spec["num"]) < 1:
        raise ConfigError("times.num must be >= 1", "times.num")
    return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))


def _run_orbit(cfg: JobConfig) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    model = build_model(cfg.model)
    t = _orbit_times(cfg)
    if np.any(t < 0) and not model.is_group:
        raise ConfigError("negative times on a model that is not a group", "times")
    columns: dict[str, np.ndarray] = {"t": t}
    result: dict[str, Any] = {"operation": "orbit", "status": "pass", "n_times": len(t)}
    if isinstance(model, MatrixModel):
        x = parse_vector(cfg.x)
        traj = matrix_orbit(model.generator, x, t)
        for j in range(model.dim):
            columns[f"x{j + 1}_re"] = traj[:, j].real
            columns[f"x{j + 1}_im"] = traj[:, j].imag
        if cfg.x_sun is not None:
            f = orbit_function(model, x, parse_vector(cfg.x_sun))
            vals = f(t)
            columns["f_re"], columns["f_im"] = vals.real, vals.imag
        if cfg.eps is not None:
            result["precompactness"] = orbit_precompactness_probe(model, x, t, cfg.eps)
        result["final_state"] = traj[-1]
    else:
        signal = make_signal(cfg.x) if isinstance(cfg.x, dict) else model.canonical_signal()
        vals = np.asarray(signal(t))
        if vals.ndim == 1:
            columns["f_re"], columns["f_im"] = np.real(vals), np.imag(vals)
        else:
            for j in range(vals.shape[1]):
                columns[f"x{j + 1}"] = np.real(vals[:, j])
        if cfg.eps is not None:
            result["precompactness"] = orbit_precompactness_probe(model, signal, t, cfg.eps)
    return [result], columns


def run_job(cfg: JobConfig) -> tuple[dict[str, Any], dict[str, np.ndarray] | None]:
    """Run one job; returns the report record and optional trajectory columns."""
    start = time.perf_counter()
    columns = None
    if cfg.command == "split":
        results = _run_split(cfg)
    elif cfg.command == "mean":
        results = _run_mean(cfg)
    elif cfg.command == "wap":
        results = _run_wap(cfg)
    elif cfg.command == "repro":
        results = _run_repro(cfg)
    else:
        results, columns = _run_orbit(cfg)
    record = {
        "job_id": cfg.job_id(),
        "command": cfg.command,
        "status": overall_status(results),
        "results": jsonable(results),
        "wall_time": round(time.perf_counter() - start, 6),
        "version": __version__,
        "config": jsonable(cfg.to_dict()),
    }
    return record, columns


def overall_status(results: list[dict[str, Any]]) -> str:
    statuses = [r["status"] for r in results]
    if "fail" in statuses:
        return "fail"
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return "pass"


def exit_code(record: dict[str, Any]) -> int:
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[record["status"]]


def dumps_record(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=False)


def write_outputs(record: dict[str, Any], columns, out_dir: str | None) -> None:
    line = dumps_record(record)
    if out_dir is None:
        sys.stdout.write(line + "\n")
        return
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.jsonl"), "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    if columns is not None:
        path = os.path.join(out_dir, f"orbit_{record['job_id']}.csv")
        names = list(columns)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            for row in zip(*(columns[n] for n in names)):
                w.writerow([repr(float(v)) for v in row])


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apsplit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"apsplit {__version__}")
    sub = p.add_subparsers(dest="sub", required=True)

    def common(sp, needs_config: bool):
        sp.add_argument("--config", required=needs_config, help="YAML job file")
        sp.add_argument("--out", help="directory for report.jsonl and CSV trajectories (default: stdout)")
        sp.add_argument("--tol", type=float, help="override the tolerance")
        sp.add_argument("--seed", type=int, help="seed for randomized sweeps (never used by claims)")

    for name in ("split", "mean", "wap", "orbit", "run"):
        common(sub.add_parser(name, help=f"run a {name} job" if name != "run" else "run the job in a config"), True)
    rp = sub.add_parser("repro", help="reproduce registered claims")
    common(rp, False)
    rp.add_argument("--claim", action="append", help="claim id (repeatable; default: all)")
    lp = sub.add_parser("list-claims", help="list reproducible claims")
    lp.add_argument("--json", action="store_true", help="one JSON object per line")
    return p


def _load(args) -> JobConfig:
    overrides = {"tol": args.tol, "seed": args.seed}
    if args.sub == "repro" and args.claim:
        overrides["claims"] = list(args.claim)
    defaults = {} if args.sub == "run" else {"command": args.sub}
    if args.config is None:
        raw = cfgmod.apply_env(defaults)
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cfgmod.validate(raw)
    cfg = cfgmod.load_file(args.config, overrides=overrides, defaults=defaults)
    if args.sub != "run" and cfg.command != args.sub:
        raise ConfigError(f"config command '{cfg.command}' does not match subcommand '{args.sub}'", "command")
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="apsplit: %(message)s")
    args = _parser().parse_args(argv)
    if args.sub == "list-claims":
        for c in claims.list_claims():
            if args.json:
                print(json.dumps(c, sort_keys=True))
            else:
                print(f"{c['id']:<14}{c['tolerance']:<10g}{c['title']}")
        return EXIT_OK
    try:
        cfg = _load(args)
        record, columns = run_job(cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OverflowError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (KeyError, TypeError, ValueError) as exc:
        log.error("invalid job: %s", exc)
        return EXIT_CONFIG
    out_dir = args.out or cfg.output.get("dir")
    write_outputs(record, columns, out_dir)
    return exit_code(record)


if __name__ == "__main__":
    sys.exit(main())
