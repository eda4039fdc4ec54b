import json

import pytest

from conekernel.cli import main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_geom_passes(tmp_path, capsys):
    code, out = run(["geom", "--out", str(tmp_path), "--seed", "5"], capsys)
    assert code == 0
    assert "[PASS]" in out.out
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["environment"]["seed"] == 5 and rep["status"] == "pass"


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["geom", "--seed", "x"],
    ["geom", "--seed", "-3"],
    ["geom", "--threads", "0"],
    ["geom", "--tol", "1e-6"],
    ["phi", "--tol", "-1"],
])
def test_usage_errors_exit_2(argv, capsys, tmp_path):
    code, _ = run(argv + (["--out", str(tmp_path)] if argv and argv[0] in ("geom", "phi") else []), capsys)
    assert code == 2


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: phi\nmodel: {alpha: 3}\n")
    assert run(["phi", "--config", str(bad)], capsys)[0] == 2
    other = tmp_path / "other.yaml"
    other.write_text("experiment: geom\n")
    assert run(["phi", "--config", str(other)], capsys)[0] == 2
    assert run(["phi", "--config", str(tmp_path / "missing.yaml")], capsys)[0] == 2


def test_flags_override_config(tmp_path, capsys):
    cfgf = tmp_path / "c.yaml"
    cfgf.write_text("experiment: phi\nseed: 1\nparams: {n_random: 10, homogeneity_tol: 1.0e-3}\n")
    out = tmp_path / "run"
    assert run(["phi", "--config", str(cfgf), "--seed", "9", "--tol", "1e-7", "--out", str(out)], capsys)[0] == 0
    snap = (out / "config.yaml").read_text()
    assert "seed: 9" in snap and "homogeneity_tol: 1.0e-07" in snap and "n_random: 10" in snap


def test_failing_check_exits_1(tmp_path, capsys):
    cfgf = tmp_path / "c.yaml"
    cfgf.write_text("experiment: phi\nparams: {check_isotropy: true}\n")
    code, out = run(["phi", "--config", str(cfgf), "--out", str(tmp_path / "r")], capsys)
    assert code == 1 and "[FAIL]" in out.out


def test_report_command(tmp_path, capsys):
    assert run(["report", str(tmp_path)], capsys)[0] == 2
    run(["geom", "--out", str(tmp_path / "g")], capsys)
    code, out = run(["report", "--out", str(tmp_path)], capsys)
    assert code == 0 and "overall: PASS" in out.out
    cfgf = tmp_path / "c.yaml"
    cfgf.write_text("experiment: phi\nparams: {check_isotropy: true}\n")
    run(["phi", "--config", str(cfgf), "--out", str(tmp_path / "p")], capsys)
    assert run(["report", str(tmp_path)], capsys)[0] == 1
    assert run(["report", str(tmp_path / "nowhere")], capsys)[0] == 2


def test_threads_env_is_read(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CONEKERNEL_THREADS", "nope")
    assert run(["geom", "--out", str(tmp_path)], capsys)[0] == 2
    monkeypatch.setenv("CONEKERNEL_THREADS", "2")
    assert run(["geom", "--out", str(tmp_path)], capsys)[0] == 0
