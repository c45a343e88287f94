import json

import pytest

from polycauchy.cli import main, make_config, parse_config_file, report_path
from polycauchy.suites import ConfigError, ExperimentConfig, decreasing, run


def test_kernels_suite_passes(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = main(["kernels", "--levels", "4,8", "--tol", "gauss_exterior=1e-4", "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "overall: PASS" in text and "principal_value" in text
    report = json.loads(out.read_text())
    assert report["pass"] and report["config"]["levels"] == [4, 8]
    assert {"numpy", "scipy", "python"} <= set(report["environment"])


def test_unsupported_order_is_expected(capsys):
    assert main(["kernels", "--m", "2", "--kernel-order", "2", "--levels", "4"]) == 0
    assert "unsupported_order" in capsys.readouterr().out


def test_failing_tolerance_gives_exit_one(capsys):
    assert main(["kernels", "--levels", "4", "--tol", "recursion=1e-30"]) == 1
    assert "overall: FAIL" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["kernels", "--levels", "8,4"],
        ["kernels", "--alpha", "1.5"],
        ["kernels", "--tol", "nonsense=1"],
        ["kernels", "--tol", "missing-equals"],
        ["involution", "--data", "file", "--levels", "4"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_config_file_and_overrides(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nm = 2\nk=0\nlevels=4,8\ntol.principal_value = 1e-2\n")
    raw = parse_config_file(cfg)
    assert raw["m"] == "2" and raw["tol.principal_value"] == "1e-2"
    conf = make_config(raw)
    assert conf.m == 2 and conf.levels == (4, 8) and conf.tol("principal_value") == 1e-2
    monkeypatch.setenv("POLYCAUCHY_OUTPUT_DIR", str(tmp_path))
    assert main(["kernels", "--config", str(cfg), "--kernel-order", "0"]) == 0
    assert (tmp_path / "kernels-report.json").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("m 3\n")
    assert main(["kernels", "--config", str(bad)]) == 2


def test_report_path_resolution(tmp_path, monkeypatch):
    monkeypatch.delenv("POLYCAUCHY_OUTPUT_DIR", raising=False)
    assert report_path("jump", None) is None
    monkeypatch.setenv("POLYCAUCHY_OUTPUT_DIR", str(tmp_path))
    assert report_path("jump", "x.json") == tmp_path / "x.json"
    assert report_path("jump", "/abs/x.json").is_absolute()


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(m=4)
    with pytest.raises(ConfigError):
        ExperimentConfig(data="noise")
    with pytest.raises(ConfigError):
        make_config({"colour": "red"})
    with pytest.raises(ConfigError):
        make_config({"k": "one"})


def test_decreasing_rule():
    assert decreasing([1e-2, 5e-3, 1e-3], 1.0)
    assert decreasing([1e-2, 1.05e-2], 1.0)
    assert not decreasing([1e-2, 2e-2], 1.0)
    # rounding-level errors count as converged
    assert decreasing([1e-14, 3e-14], 1e-3)


def test_small_whitney_and_rh_runs():
    cfg = ExperimentConfig(m=2, k=0, levels=(8,), data="trig", nodes=8)
    report = run("jump", cfg)
    assert report["pass"]
    assert any(r["name"] == "classical_operator" for r in report["records"])
