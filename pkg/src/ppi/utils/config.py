from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ppi.errors import SchemaError


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="PPI_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Core
    ENV: str = "dev"
    OUT_DIR: Path = Path("./out")

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True

    # Prometheus text exposition, written after each command when set
    METRICS_FILE: Path | None = None


class SimulationSection(BaseModel):
    model_config = {"extra": "forbid"}

    budget: float = Field(1.0, gt=0)
    gamma: float = Field(1.0, gt=0)
    epsilon: float = Field(1e-3, gt=0)
    target_tol: float = Field(1e-2, gt=0)
    max_steps: int = Field(10_000, ge=1)


class IndicatorsSection(BaseModel):
    model_config = {"extra": "forbid"}

    rule_of_law: str | None = None
    control_of_corruption: str | None = None
    # diversion of public funds; excluded from estimation and simulation
    corruption: str | None = None


class NetworkSection(BaseModel):
    model_config = {"extra": "forbid"}

    differencing: bool = True
    shrinkage: float = Field(0.2, ge=0, le=1)
    tie_tol: float = Field(1e-3, ge=0)


class CalibrationSection(BaseModel):
    model_config = {"extra": "forbid"}

    gamma_min: float = Field(1.0, gt=0)
    gamma_max: float = Field(30.0, gt=0)
    gamma_points: int = Field(117, ge=1)
    runs: int = Field(100, ge=1)
    subset_samples: int = Field(10_000, ge=1)


class AnalysisSection(BaseModel):
    model_config = {"extra": "forbid"}

    clusters: int = Field(4, ge=1)
    top_k: int = Field(10, ge=1)
    bins: int = Field(20, ge=1)
    min_bin_count: int = Field(3, ge=1)


class RunSection(BaseModel):
    model_config = {"extra": "forbid"}

    seed: int = Field(0, ge=0)
    runs: int = Field(1000, ge=1)
    jobs: int = Field(1, ge=1)


class RunConfig(BaseModel):
    """Resolved run configuration: defaults < config file < command-line flags."""

    model_config = {"extra": "forbid"}

    simulation: SimulationSection = Field(default_factory=SimulationSection)
    indicators: IndicatorsSection = Field(default_factory=IndicatorsSection)
    network: NetworkSection = Field(default_factory=NetworkSection)
    calibration: CalibrationSection = Field(default_factory=CalibrationSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    run: RunSection = Field(default_factory=RunSection)

    @classmethod
    def load(cls, path: Path | None = None, overrides: dict[str, dict[str, Any]] | None = None) -> RunConfig:
        data: dict[str, dict[str, Any]] = {}
        if path is not None:
            try:
                data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError as e:
                raise SchemaError("config file not found", path=str(path)) from e
            except tomllib.TOMLDecodeError as e:
                raise SchemaError(f"config file is not valid TOML: {e}", path=str(path)) from e
            unknown = sorted(set(data) - set(cls.model_fields))
            if unknown:
                raise SchemaError("unknown config sections", path=str(path), columns=unknown)
        for section, values in (overrides or {}).items():
            # flags left at None fall through to the file / defaults
            kept = {k: v for k, v in values.items() if v is not None}
            if kept:
                data.setdefault(section, {}).update(kept)
        return cls.model_validate(data)
