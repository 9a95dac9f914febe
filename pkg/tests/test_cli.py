import json
import os

import pytest

from rampmerge.cli import main


def run_cli(*args):
    return main(list(args))


def test_run_writes_artifacts(tmp_path):
    out = tmp_path / "run1"
    code = run_cli("run", "--mode", "coop", "--seed", "1", "--out", str(out),
                   "--override", "duration=2.0")
    assert code == 0
    for name in ("trajectory.csv", "events.ndjson", "metrics.json", "scenario.json"):
        assert (out / name).exists()
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,id,path,station_m,speed_mps,accel_mps2,mode,seq,ttc_s"


def test_run_repeat_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli("run", "--mode", "coop", "--seed", "3", "--out", str(out),
                       "--override", "duration=6.0") == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "events.ndjson").read_bytes() == (b / "events.ndjson").read_bytes()


def test_run_validation_error_exit_code(tmp_path):
    code = run_cli("run", "--out", str(tmp_path / "x"), "--override", "duration=-5")
    assert code == 2


def test_run_unknown_mode_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli("run", "--mode", "warp", "--out", str(tmp_path / "x"))
    assert err.value.code == 2


def test_run_env_var_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("RAMPMERGE_OUT", str(tmp_path / "envout"))
    code = run_cli("run", "--override", "duration=1.0")
    assert code == 0
    assert (tmp_path / "envout" / "metrics.json").exists()


def test_compare_reports(tmp_path, capsys):
    coop = tmp_path / "coop"
    base = tmp_path / "base"
    assert run_cli("run", "--mode", "coop", "--seed", "1", "--out", str(coop)) == 0
    assert run_cli("run", "--mode", "aggressive", "--seed", "1", "--out", str(base)) == 0
    report_dir = tmp_path / "report"
    code = run_cli("compare", "--coop", str(coop), "--baseline", str(base),
                   "--out", str(report_dir))
    assert code == 0
    text = capsys.readouterr().out
    assert "Reduction Percentage" in text
    doc = json.loads((report_dir / "report.json").read_text())
    assert doc["baseline_runs"] == 1


def test_compare_self_is_zero(tmp_path, capsys):
    coop = tmp_path / "coop"
    assert run_cli("run", "--mode", "coop", "--seed", "1", "--out", str(coop)) == 0
    code = run_cli("compare", "--coop", str(coop), "--baseline", str(coop))
    assert code == 0
    out = capsys.readouterr().out
    reductions = out.strip().splitlines()[-1].split()
    values = [float(x) for x in reductions[2:]]
    assert all(abs(v) < 1e-9 for v in values)


def test_compare_missing_dir(tmp_path):
    code = run_cli("compare", "--coop", str(tmp_path / "nope"),
                   "--baseline", str(tmp_path / "nada"))
    assert code == 4


def test_serve_requires_realtime_for_human(tmp_path):
    code = run_cli("serve", "--port", "8701", "--mode", "human",
                   "--out", str(tmp_path / "x"))
    assert code == 2
