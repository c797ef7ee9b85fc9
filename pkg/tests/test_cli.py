import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from apsplit import cli, config
from apsplit.config import ConfigError

SPLIT = """\
command: split
model:
  variant: matrix
  dim: 3
  entries: [0, 0, 0,
            0, [0, 1], 0,
            0, 0, -1]
x: [1, 1, 1]
"""


def write(tmp_path, text, name="job.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def run(capsys, caplog):
    def go(argv):
        caplog.clear()
        code = cli.main(argv)
        out, err = capsys.readouterr()
        records = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
        return code, records, err + caplog.text
    return go


def as_complex(v):
    return np.array([complex(*z) for z in v])


def test_split_job(tmp_path, run):
    code, (rec,), _ = run(["split", "--config", write(tmp_path, SPLIT)])
    assert code == 0
    assert rec["status"] == "pass" and rec["command"] == "split"
    x_a = as_complex(rec["results"][0]["report"]["x_a"])
    assert np.linalg.norm(x_a - [1, 1, 0]) <= 1e-4
    assert set(rec) == {"job_id", "command", "status", "results", "wall_time", "version", "config"}


def test_repro_power16_claim(run):
    code, (rec,), _ = run(["repro", "--claim", "11.10"])
    assert code == 0
    assert rec["results"][0]["claim"] == "11.10"
    assert rec["results"][0]["result"]["pass"] is True


def test_matrix_arity_error(tmp_path, run):
    bad = "command: split\nmodel:\n  dim: 2\n  entries: [1, 2, 3, 4, 5]\nx: [1, 1]\n"
    code, recs, err = run(["split", "--config", write(tmp_path, bad)])
    assert code == 2 and recs == []
    assert "line 4" in err and "model.entries" in err


def test_unreadable_config(tmp_path, run):
    code, _, err = run(["split", "--config", write(tmp_path, "command: [split\n")])
    assert code == 2 and "line" in err
    code, _, _ = run(["split", "--config", str(tmp_path / "missing.yaml")])
    assert code == 2


def test_list_claims(capsys):
    code = cli.main(["list-claims", "--json"])
    out = capsys.readouterr().out
    ids = [json.loads(line)["id"] for line in out.splitlines()]
    assert code == 0
    assert "11.2" in ids and "7.12-decay" in ids
    assert len(ids) == len(set(ids))
    cli.main(["list-claims", "--json"])
    assert capsys.readouterr().out == out


def test_config_round_trip(tmp_path, run):
    _, (rec,), _ = run(["split", "--config", write(tmp_path, SPLIT)])
    again = config.from_dict(rec["config"])
    original = config.load(SPLIT)
    assert again.job_id() == original.job_id() == rec["job_id"]
    assert again.to_dict() == original.to_dict()


def test_determinism(tmp_path, run):
    path = write(tmp_path, SPLIT)
    _, (a,), _ = run(["split", "--config", path])
    _, (b,), _ = run(["split", "--config", path])
    a.pop("wall_time")
    b.pop("wall_time")
    assert cli.dumps_record(a) == cli.dumps_record(b)


def test_env_override(tmp_path, monkeypatch, run):
    monkeypatch.setenv("APSPLIT_TOL", "1e-5")
    monkeypatch.setenv("APSPLIT_SCHEDULE__R0", "32")
    cfg = config.load_file(write(tmp_path, SPLIT))
    assert cfg.tol == 1e-5 and cfg.schedule["r0"] == 32
    monkeypatch.setenv("APSPLIT_CLAIMS", "11.10")
    code, (rec,), _ = run(["repro"])
    assert code == 0 and [r["claim"] for r in rec["results"]] == ["11.10"]


def test_flag_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("APSPLIT_TOL", "1e-5")
    cfg = config.load_file(write(tmp_path, SPLIT), overrides={"tol": 1e-7})
    assert cfg.tol == 1e-7


def test_number_literals():
    assert config.parse_number("exp(2)") == pytest.approx(math.exp(2), rel=1e-15)
    assert config.parse_number("16^3") == 4096
    assert config.parse_number("pi/2") == pytest.approx(math.pi / 2, rel=1e-15)
    assert config.parse_number("exp(2*10*pi + pi/2)") == math.exp(20 * math.pi + math.pi / 2)
    assert config.parse_complex([0, 1]) == 1j
    np.testing.assert_array_equal(config.parse_vector([1, [0, 2], "16^1"]), [1, 2j, 16])
    for bad in ("__import__('os')", "x", "2**100000", "open(1)"):
        with pytest.raises((ConfigError, ValueError, OverflowError)):
            config.parse_number(bad)


def test_family_overflow_exit(tmp_path, run):
    text = """\
command: wap
signal: {name: log_sin}
families:
  - a: {kind: power16, m_min: 0, m_max: 70}
    b: {kind: power16_shift, m_min: 0, m_max: 60}
"""
    code, recs, err = run(["wap", "--config", write(tmp_path, text)])
    assert code == 2 and recs == []
    assert "m_max" in err


def test_orbit_csv(tmp_path, capsys):
    text = """\
command: orbit
model: {dim: 1, entries: [[0, 1]]}
x: [1]
x_sun: [1]
times: {start: 0, stop: "2*pi", num: 9}
eps: 0.1
"""
    out = tmp_path / "out"
    code = cli.main(["orbit", "--config", write(tmp_path, text), "--out", str(out)])
    assert code == 0
    (rec,) = [json.loads(line) for line in (out / "report.jsonl").read_text().splitlines()]
    with open(out / f"orbit_{rec['job_id']}.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1_re", "x1_im", "f_re", "f_im"]
    t = np.array([float(r[0]) for r in rows[1:]])
    np.testing.assert_allclose(t, np.linspace(0, 2 * math.pi, 9), atol=1e-15)
    f = np.array([complex(float(r[3]), float(r[4])) for r in rows[1:]])
    np.testing.assert_allclose(f, np.exp(-1j * t), atol=1e-12)


def test_inconclusive_exit(tmp_path, run):
    text = """\
command: wap
signal: {name: log_sin}
families:
  - a: {kind: exponential, tau: "pi/2", m_min: 0, m_max: 40}
    b: {kind: exponential, tau: "3*pi/2", m_min: 0, m_max: 40}
bohr: [0]
schedule: {r0: 16, k_max: 6}
"""
    code, (rec,), _ = run(["wap", "--config", write(tmp_path, text)])
    assert code == 3 and rec["status"] == "inconclusive"
    statuses = [r["status"] for r in rec["results"]]
    assert "pass" in statuses and "inconclusive" in statuses


def test_unknown_claim_and_mismatch(tmp_path, run):
    code, _, err = run(["repro", "--claim", "99.9"])
    assert code == 2 and "99.9" in err
    code, _, err = run(["mean", "--config", write(tmp_path, SPLIT)])
    assert code == 2 and "does not match" in err


def test_failed_check_exit():
    rec = {"status": "fail"}
    assert cli.exit_code(rec) == 1
    assert cli.overall_status([{"status": "pass"}, {"status": "inconclusive"}, {"status": "fail"}]) == "fail"


def test_nonfinite_marked_inconclusive():
    out = cli.jsonable({"a": math.inf, "b": complex(math.nan, 0), "c": np.array([1.0, 2.0]), "d": 1j})
    assert out == {"a": "inconclusive", "b": "inconclusive", "c": [1.0, 2.0], "d": [0.0, 1.0]}


def test_mean_job_weighted(tmp_path, run):
    text = SPLIT.replace("command: split", "command: mean") + "omega: 1\n"
    code, (rec,), _ = run(["mean", "--config", write(tmp_path, text)])
    assert code == 0
    assert rec["results"][0]["operation"] == "weighted_mean"
    value = as_complex(rec["results"][0]["estimate"]["value"])
    assert np.linalg.norm(value - [0, 1, 0]) <= 1e-5


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "apsplit.cli", "list-claims"], capture_output=True, text=True)
    assert proc.returncode == 0 and "11.11" in proc.stdout
