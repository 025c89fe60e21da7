from __future__ import annotations

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GammaGrid(BaseModel):
    """Candidate γ values, strictly increasing and positive."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    values: tuple[float, ...]

    @field_validator("values")
    @classmethod
    def check_increasing(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("gamma grid must not be empty")
        if any(g <= 0 for g in v):
            raise ValueError("gamma values must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("gamma grid must be strictly increasing")
        return v

    @classmethod
    def linspace(cls, gamma_min: float = 1.0, gamma_max: float = 30.0, points: int = 117) -> GammaGrid:
        if points == 1:
            return cls(values=(float(gamma_min),))
        return cls(values=tuple(float(g) for g in np.linspace(gamma_min, gamma_max, points)))

    def __len__(self) -> int:
        return len(self.values)

    def index(self, gamma: float) -> int:
        return self.values.index(gamma)


class CalibrationResult(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    assignment: dict[str, float]
    reference_country: str
    reference_gamma: float
    mse: float = Field(ge=0)
    distinct_count: int = Field(ge=1)
    gammas: tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_assignment(self) -> CalibrationResult:
        if self.reference_country not in self.assignment:
            raise ValueError("reference country missing from assignment")
        if self.gammas and not set(self.assignment.values()) <= set(self.gammas):
            raise ValueError("assignment uses a γ outside the selected set")
        return self


class ProfileMode(str, Enum):
    RETROSPECTIVE = "retrospective"
    FOOTPRINT = "footprint"


class AllocationProfile(BaseModel):
    """Mean allocation per issue with its standard error and pillar aggregation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    country: str
    mode: ProfileMode = ProfileMode.RETROSPECTIVE
    target_country: str | None = None
    indicators: tuple[str, ...]
    mean: tuple[float, ...]
    stderr: tuple[float, ...]
    pillars: dict[str, str]
    budget: float = Field(gt=0)
    runs: int = Field(ge=0)
    nonconverged: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_lengths(self) -> AllocationProfile:
        n = len(self.indicators)
        if len(self.mean) != n or len(self.stderr) != n:
            raise ValueError("profile vectors differ in length from the indicator list")
        if self.mode is ProfileMode.FOOTPRINT and self.target_country is None:
            raise ValueError("footprint profiles need a target country")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mean, dtype=float)

    def pillar_totals(self) -> dict[str, float]:
        """Summed allocation per pillar; totals add up to the budget."""
        out: dict[str, float] = {}
        for name, value in zip(self.indicators, self.mean):
            pillar = self.pillars.get(name, "unassigned")
            out[pillar] = out.get(pillar, 0.0) + value
        return out

    def pillar_means(self) -> dict[str, float]:
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for name, value in zip(self.indicators, self.mean):
            pillar = self.pillars.get(name, "unassigned")
            sums[pillar] = sums.get(pillar, 0.0) + value
            counts[pillar] = counts.get(pillar, 0) + 1
        return {p: sums[p] / counts[p] for p in sums}

    def top_pillar(self) -> str:
        totals = self.pillar_totals()
        # first pillar in indicator order wins ties
        return max(totals, key=lambda p: totals[p])


class FootprintEdge(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    follower: str
    target: str
    feasibility: float = Field(ge=0, le=1)
    target_similarity: float = Field(ge=0, le=1)
    top_pillar: str


class RunManifest(BaseModel):
    """Everything needed to re-run a command bit-identically."""

    model_config = ConfigDict(extra="forbid")

    schemaVersion: str = Field("v1")
    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    config_path: str | None = None
    seed: int = Field(ge=0)
    out_dir: str
    tool_version: str
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)

    @field_validator("inputs")
    @classmethod
    def check_digests(cls, v: dict[str, str]) -> dict[str, str]:
        for path, digest in v.items():
            if len(digest) != 64 or any(ch not in "0123456789abcdef" for ch in digest):
                raise ValueError(f"input digest for {path} is not a sha256 hex string")
        return v
