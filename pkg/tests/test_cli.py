import json
import subprocess
import sys

import pytest

from parakahler import cli


def run(tmp_path, *argv):
    return cli.main([*argv, "--output-dir", str(tmp_path)])


def read(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_einstein_example(tmp_path):
    assert run(tmp_path, "check-einstein", "--space", "desitter(1)xdesitter(1)", "--eps", "+1") == 0
    rep = read(tmp_path, "check-einstein.json")
    assert rep["passed"] and all(c["value"] < 1e-5 for c in rep["checks"])


def test_conformally_flat_example(tmp_path):
    assert run(tmp_path, "check-conformally-flat", "--space", "desitter(1)xdesitter(1)", "--eps", "-1") == 0


def test_h_minimality_example(tmp_path):
    code = run(tmp_path, "h-minimality", "--curves", "cornu(1,0),cornu(-1,0)",
               "--space", "minkowski×minkowski", "--eps", "+1", "--resolution", "24")
    assert code == 0


def test_failing_checks_exit_one(tmp_path):
    assert run(tmp_path, "check-einstein", "--space", "desitter(1)xdesitter(2)", "--eps", "+1") == 1
    assert read(tmp_path, "check-einstein.json")["passed"] is False
    code = run(tmp_path, "h-minimality", "--curves", "cornu(1,1),cornu(1,1)",
               "--space", "minkowski×minkowski", "--eps", "+1", "--resolution", "24")
    assert code == 1


def test_config_errors_exit_two(tmp_path, capsys):
    assert run(tmp_path, "check-einstein", "--space", "sphere x sphere") == 2
    assert run(tmp_path, "check-einstein", "--eps", "2") == 2
    assert run(tmp_path, "curve", "--resolution", "4") == 2
    assert run(tmp_path, "check-einstein", "--tol-einstein", "-1") == 2
    assert "configuration error" in capsys.readouterr().err


def test_domain_error_exits_three(tmp_path):
    code = run(tmp_path, "curve", "--chart", "minkowski", "--direction", "1,1")
    assert code == 3
    rec = read(tmp_path, "curve.error.json")
    assert rec["schema"] == cli.ERROR_SCHEMA and rec["error"] == "NullCurve"


def test_show_defaults(capsys):
    assert cli.main(["--show-defaults"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["resolution"] == 64 and shown["curvature_step"] == 1e-4


def test_config_file_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = check-einstein\nspace = desitter(1)xdesitter(2)\neps = 1\n")
    out = tmp_path / "out"
    assert cli.main(["--config", str(cfg), "--output-dir", str(out)]) == 1
    # flags beat the file
    assert cli.main(["--config", str(cfg), "--space", "desitter(1)xdesitter(1)", "--output-dir", str(out)]) == 0
    # env var sets the output directory when no flag is given
    env_dir = tmp_path / "env"
    monkeypatch.setenv(cli.ENV_OUTPUT, str(env_dir))
    assert cli.main(["--config", str(cfg), "--space", "desitter(1)xdesitter(1)"]) == 0
    assert (env_dir / "check-einstein.json").exists()
    cfg.write_text("command = check-einstein\nbogus = 1\n")
    assert cli.main(["--config", str(cfg)]) == 2


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["ads-gauss-demo", "--n-fields", "20", "--resolution", "24", "--output-dir", str(d)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and any(n.endswith(".csv") for n in names)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_curve_trace_csv(tmp_path):
    assert run(tmp_path, "curve", "--chart", "desitter(1)", "--direction", "0,1", "--profile", "cornu(0.5,0)",
               "--length", "1") == 0
    lines = (tmp_path / "curve.trace.csv").read_text().splitlines()
    assert lines[0].startswith("s,") and len(lines) > 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "parakahler.cli", "check-einstein", "--output-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
