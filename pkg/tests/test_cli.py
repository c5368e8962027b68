"""CLI contract: subcommands, outputs, determinism, exit codes."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from qcjohn import ConfigError, RunConfig, emit_plot_data, run
from qcjohn.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def _fast_args(out):
    return ["--out", str(out), "--ladder", "6", "--rays", "8", "--no-figures"]


def test_analyze_writes_report_and_csvs(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, ["analyze", "--map", "identity", *_fast_args(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["label"] == "identity"
    assert set(report["suites"]) == {
        "frame", "john", "pommerenke", "schwarz", "hardy", "coeffs", "lemmas"
    }
    john = report["suites"]["john"]["john"]
    assert list(john) == ["label", "c", "M1", "delta_hat", "M_hat", "Mgamma",
                          "verdict", "config"]
    assert (out / "john_violation_curve.csv").exists()
    assert (out / "boundary_mesh.csv").exists()


def test_john_subcommand_lune_failing(runner, tmp_path):
    out = tmp_path / "lune"
    result = runner.invoke(main, [
        "john", "--map", "analytic", "--params", '{"expr": "lune"}',
        "--out", str(out), "--ladder", "10", "--rays", "16", "--no-figures",
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    john = report["suites"]["john"]["john"]
    assert john["verdict"] == "john-failing"
    assert john["c"] == "inf" and john["M1"] == "inf"
    assert john["delta_hat"] == 0.01


def test_preschwarzian_subcommand(runner, tmp_path):
    out = tmp_path / "ps"
    result = runner.invoke(main, ["preschwarzian", "--map", "koebe", *_fast_args(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["suites"]["schwarz"]["boundary_pass"] is False
    assert (out / "preschwarzian_maxima.csv").exists()


def test_spec_file_input(runner, tmp_path):
    spec = tmp_path / "map.json"
    spec.write_text(json.dumps({
        "kind": "series", "name": "half-shear",
        "h": [[0, 0], [1, 0]], "g": [[0, 0], [0, 0], [0.25, 0]],
    }))
    out = tmp_path / "spec-out"
    result = runner.invoke(main, [
        "coeffs", "--spec", str(spec), "--out", str(out), "--no-figures",
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["label"] == "half-shear"


def test_determinism_byte_identical(runner, tmp_path):
    out = tmp_path / "det"
    args = ["analyze", "--map", "identity", "--suites", "frame,hardy,coeffs",
            *_fast_args(out)]
    assert runner.invoke(main, args).exit_code == 0
    first = (out / "report.json").read_bytes()
    assert runner.invoke(main, args).exit_code == 0
    assert (out / "report.json").read_bytes() == first


def test_config_file_roundtrip(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "map": "affine", "params": {"a": 0.25}, "ladder_depth": 6,
        "rays": 8, "suites": ["frame"], "out_dir": str(tmp_path / "cfg-out"),
        "figures": False,
    }))
    result = runner.invoke(main, ["analyze", "--config", str(cfg)])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "cfg-out" / "report.json").read_text())
    assert report["config"]["rays"] == 8
    assert list(report["suites"]) == ["frame"]


def test_exit_code_on_bad_threshold_key(runner, tmp_path):
    cfg = tmp_path / "bad-threshold.json"
    cfg.write_text('{"map": "identity", "thresholds": {"typo_key": 1}}')
    result = runner.invoke(main, ["analyze", "--config", str(cfg)])
    assert result.exit_code == 2


def test_exit_code_on_bad_epsilon(runner, tmp_path):
    result = runner.invoke(main, [
        "analyze", "--map", "identity", "--epsilon", "0.1",
        "--out", str(tmp_path / "x"),
    ])
    assert result.exit_code == 2


def test_exit_code_on_invariant_violation(runner, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({
        "kind": "series", "h": [[1, 0]], "flags": {"in_SH": True},
    }))
    result = runner.invoke(main, [
        "analyze", "--spec", str(spec), "--out", str(tmp_path / "y"),
    ])
    assert result.exit_code == 2


def test_exit_code_on_evaluation_error(runner, tmp_path):
    result = runner.invoke(main, [
        "analyze", "--map", "doesnotexist", "--out", str(tmp_path / "z"),
    ])
    assert result.exit_code == 3


def test_figures_rendered(runner, tmp_path):
    out = tmp_path / "figs"
    result = runner.invoke(main, [
        "hardy", "--map", "identity", "--out", str(out),
        "--ladder", "6", "--rays", "8",
    ])
    assert result.exit_code == 0, result.output
    assert (out / "hardy_means.png").exists()
    assert (out / "boundary_mesh.png").exists()


def test_emit_plot_data_format(tmp_path):
    path = tmp_path / "series.csv"
    emit_plot_data([0.5, 0.25], {"ratio": [0.5, 0.25]}, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,ratio"
    assert lines[1] == "0.5,0.5"
    # empty series: header only
    empty = tmp_path / "empty.csv"
    emit_plot_data([], {"ratio": []}, empty)
    assert empty.read_text() == "x,ratio\n"
    with pytest.raises(ConfigError):
        emit_plot_data([1.0], {"bad": []}, tmp_path / "bad.csv")


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(map_name="identity", suites=())
    with pytest.raises(ConfigError):
        RunConfig(map_name="identity", suites=("nope",))
    with pytest.raises(ConfigError):
        RunConfig(map_name="identity", ladder_depth=2)
    with pytest.raises(ConfigError):
        RunConfig(map_name=None, spec_path=None)
    with pytest.raises(ConfigError):
        RunConfig(map_name="identity", spec_path="also.json")
