from __future__ import annotations

from pathlib import Path

import orjson
import pandas as pd
import pytest
from typer.testing import CliRunner

from ppi.cli import app

runner = CliRunner()

SIM = ["simulate", "--nodes", "12", "--edges", "24", "--runs", "3"]


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _normalize(panel_files, run_config, out: Path):
    return _invoke(
        "normalize",
        "--panel", panel_files["panel"],
        "--pillars", panel_files["pillars"],
        "--gdp", panel_files["gdp"],
        "--config", run_config,
        "--out", out,
    )


def test_normalize_writes_outputs_and_manifest(tmp_path, panel_files, run_config):
    out = tmp_path / "norm"
    result = _normalize(panel_files, run_config, out)
    assert result.exit_code == 0, result.output
    for name in ["panel.csv", "pillars.csv", "flags.csv", "clusters.csv", "manifest.json"]:
        assert (out / name).exists()
    manifest = orjson.loads((out / "manifest.json").read_bytes())
    assert manifest["command"] == "normalize"
    assert manifest["outputs"][:3] == ["panel.csv", "pillars.csv", "flags.csv"]
    assert Path(panel_files["panel"]).as_posix() in manifest["inputs"]
    clusters = pd.read_csv(out / "clusters.csv")
    assert sorted(clusters["cluster"].unique()) == [1, 2, 3, 4]


def test_normalize_twice_is_stable(tmp_path, panel_files, run_config):
    first = tmp_path / "first"
    assert _normalize(panel_files, run_config, first).exit_code == 0
    second = tmp_path / "second"
    result = _invoke("normalize", "--panel", first / "panel.csv", "--no-clusters", "--out", second)
    assert result.exit_code == 0, result.output
    assert (first / "panel.csv").read_bytes() == (second / "panel.csv").read_bytes()


def test_missing_column_fails_with_its_name(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("country,year,value\nA,2000,0.5\n")
    result = _invoke("normalize", "--panel", bad, "--out", tmp_path / "out")
    assert result.exit_code == 1
    assert "Error:" in result.output
    assert "indicator" in result.output


def test_estimate_network(tmp_path, panel_files, run_config):
    out = tmp_path / "nets"
    result = _invoke("estimate-network", "--panel", panel_files["panel"], "--all", "--config", run_config, "--out", out)
    assert result.exit_code == 0, result.output
    assert len(list((out / "networks").glob("*.csv"))) == 8
    report = orjson.loads((out / "estimation_report.json").read_bytes())
    assert len(report["networks"]) == 8
    header = (out / "networks" / "C001.csv").read_text().splitlines()[0]
    assert "corruption" not in header
    similarity = pd.read_csv(out / "network_similarity.csv", index_col=0)
    assert similarity.shape == (8, 8)
    assert (similarity.to_numpy().diagonal() == 1.0).all()


def test_estimate_network_needs_a_country(tmp_path, panel_files):
    result = _invoke("estimate-network", "--panel", panel_files["panel"], "--out", tmp_path)
    assert result.exit_code == 1
    result = _invoke("estimate-network", "--panel", panel_files["panel"], "--country", "ZZZ", "--out", tmp_path)
    assert result.exit_code == 1
    assert "ZZZ" in result.output


def test_simulate_is_deterministic(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _invoke(*SIM, "--seed", 7, "--out", a).exit_code == 0
    assert _invoke(*SIM, "--seed", 7, "--out", b).exit_code == 0
    assert _invoke(*SIM, "--seed", 7, "--jobs", 2, "--out", c).exit_code == 0
    for name in ["run_series.json", "allocation.csv", "summary.json"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    for name in ["allocation.csv", "summary.json"]:
        assert (a / name).read_bytes() == (c / name).read_bytes()
    summary = orjson.loads((a / "summary.json").read_bytes())
    assert summary["runs"] == 3


def test_nonconverged_runs_warn_and_fail_only_when_strict(tmp_path):
    cfg = tmp_path / "tight.toml"
    cfg.write_text("[simulation]\nmax_steps = 1\nepsilon = 1e-15\n")
    result = _invoke(*SIM, "--config", cfg, "--out", tmp_path / "loose")
    assert result.exit_code == 0, result.output
    assert "3 runs did not converge" in result.output
    summary = orjson.loads((tmp_path / "loose" / "summary.json").read_bytes())
    assert summary["nonconverged"] == 3
    assert summary["corruption"] is None

    result = _invoke(*SIM, "--config", cfg, "--strict", "--out", tmp_path / "strict")
    assert result.exit_code == 1
    assert "--strict" in result.output


def test_simulate_needs_all_three_inputs(tmp_path, panel_files):
    result = _invoke("simulate", "--panel", panel_files["panel"], "--out", tmp_path)
    assert result.exit_code == 1


def test_replay_reproduces_outputs(tmp_path):
    first = tmp_path / "first"
    assert _invoke(*SIM, "--seed", 3, "--out", first).exit_code == 0
    before = (first / "manifest.json").read_bytes()

    result = _invoke("replay", first / "manifest.json")
    assert result.exit_code == 0, result.output
    assert (first / "manifest.json").read_bytes() == before

    copy = tmp_path / "copy"
    result = _invoke("replay", first, "--out", copy)
    assert result.exit_code == 0, result.output
    manifest = orjson.loads(before)
    for name in manifest["outputs"]:
        assert (first / name).read_bytes() == (copy / name).read_bytes()


def test_replay_of_missing_manifest(tmp_path):
    result = _invoke("replay", tmp_path)
    assert result.exit_code == 1
    assert "not found" in result.output


@pytest.fixture
def pipeline(tmp_path, panel_files, run_config):
    norm = tmp_path / "norm"
    assert _normalize(panel_files, run_config, norm).exit_code == 0
    nets = tmp_path / "nets"
    result = _invoke("estimate-network", "--panel", norm / "panel.csv", "--all", "--config", run_config, "--out", nets)
    assert result.exit_code == 0, result.output
    return {"norm": norm, "networks": nets / "networks", "config": run_config, "tmp": tmp_path}


def test_retrospective_command(pipeline):
    out = pipeline["tmp"] / "retro"
    result = _invoke(
        "retrospective",
        "--panel", pipeline["norm"] / "panel.csv",
        "--pillars", pipeline["norm"] / "pillars.csv",
        "--networks", pipeline["networks"],
        "--countries", "C001,C002",
        "--config", pipeline["config"],
        "--runs", 2,
        "--out", out,
    )
    assert result.exit_code == 0, result.output
    profiles = pd.read_csv(out / "profiles.csv")
    assert set(profiles["country"]) == {"C001", "C002"}
    assert "corruption" not in set(profiles["indicator"])
    totals = profiles.groupby("country")["mean"].sum()
    assert totals.to_numpy() == pytest.approx([1.0, 1.0])
    summary = orjson.loads((out / "summary.json").read_bytes())
    assert set(summary) == {"C001", "C002"}


def test_retrospective_without_indicator_config(pipeline):
    result = _invoke(
        "retrospective",
        "--panel", pipeline["norm"] / "panel.csv",
        "--networks", pipeline["networks"],
        "--countries", "C001",
        "--runs", 1,
        "--out", pipeline["tmp"] / "retro",
    )
    assert result.exit_code == 1
    assert "rule_of_law" in result.output


def test_sensitivity_command(pipeline):
    out = pipeline["tmp"] / "sens"
    result = _invoke(
        "sensitivity",
        "--panel", pipeline["norm"] / "panel.csv",
        "--networks", pipeline["networks"],
        "--countries", "C001,C002,C003",
        "--variants", "no-network,fixed-supervision",
        "--config", pipeline["config"],
        "--runs", 2,
        "--out", out,
    )
    assert result.exit_code == 0, result.output
    estimates = pd.read_csv(out / "point_estimates.csv")
    assert list(estimates["variant"].unique()) == ["full-model", "no-network", "fixed-supervision"]
    deltas = pd.read_csv(out / "deltas.csv")
    assert set(deltas["variant"]) == {"no-network", "fixed-supervision"}
    assert (out / "corruption_performance.csv").exists()
    summary = orjson.loads((out / "summary.json").read_bytes())
    assert "validation" in summary


def test_prospective_command(pipeline):
    out = pipeline["tmp"] / "prosp"
    result = _invoke(
        "prospective",
        "--panel", pipeline["norm"] / "panel.csv",
        "--pillars", pipeline["norm"] / "pillars.csv",
        "--networks", pipeline["networks"],
        "--clusters", pipeline["norm"] / "clusters.csv",
        "--config", pipeline["config"],
        "--runs", 1,
        "--out", out,
    )
    assert result.exit_code == 0, result.output
    clusters = pd.read_csv(pipeline["norm"] / "clusters.csv")
    label = dict(zip(clusters["country"], clusters["cluster"]))
    edges = pd.read_csv(out / "footprints.csv")
    assert len(edges) > 0
    for follower, target in zip(edges["follower"], edges["target"]):
        assert label[target] == label[follower] - 1
    assert edges["feasibility"].between(0, 1).all()
    pillars = pd.read_csv(out / "cluster_pillars.csv")
    assert set(pillars["cluster"]) == {1, 2, 3, 4}
    assert (out / "cluster_networks" / "1.csv").exists()


@pytest.mark.slow
def test_calibrate_command(pipeline):
    out = pipeline["tmp"] / "cal"
    result = _invoke(
        "calibrate",
        "--panel", pipeline["norm"] / "panel.csv",
        "--networks", pipeline["networks"],
        "--config", pipeline["config"],
        "--out", out,
    )
    assert result.exit_code == 0, result.output
    calibration = orjson.loads((out / "calibration.json").read_bytes())
    gammas = pd.read_csv(out / "gammas.csv")
    assert len(gammas) == 8
    assert set(gammas["gamma"]) <= set(calibration["gammas"])
    assert 1 <= calibration["h_star"] <= 3
