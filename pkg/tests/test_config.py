from __future__ import annotations

import pytest
from pydantic import ValidationError

from ppi.errors import SchemaError
from ppi.utils.config import RunConfig, Settings


def test_defaults():
    cfg = RunConfig.load()
    assert cfg.simulation.epsilon == 1e-3
    assert cfg.calibration.gamma_points == 117
    assert cfg.run.runs == 1000


def test_file_then_flags(run_config):
    cfg = RunConfig.load(run_config, {"run": {"seed": 9, "runs": None}, "simulation": {"max_steps": None}})
    assert cfg.simulation.max_steps == 3000
    assert cfg.indicators.rule_of_law == "p01_i1"
    assert cfg.run.seed == 9
    assert cfg.run.runs == 1000


def test_unknown_section(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[game]\nx = 1\n")
    with pytest.raises(SchemaError, match="game"):
        RunConfig.load(p)


def test_unknown_key_and_bad_value(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[simulation]\nepsilon = -1\n")
    with pytest.raises(ValidationError):
        RunConfig.load(p)
    p.write_text("[simulation]\nbudgett = 1\n")
    with pytest.raises(ValidationError):
        RunConfig.load(p)


def test_invalid_toml(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[simulation\n")
    with pytest.raises(SchemaError):
        RunConfig.load(p)


def test_settings_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv("PPI_OUT_DIR", str(tmp_path))
    monkeypatch.setenv("PPI_LOG_JSON", "false")
    s = Settings()
    assert s.OUT_DIR == tmp_path
    assert s.LOG_JSON is False
