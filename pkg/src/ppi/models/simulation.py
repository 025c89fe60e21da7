from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GovernmentMode(str, Enum):
    ADAPTIVE = "adaptive"
    RANDOM = "random"


class ServantMode(str, Enum):
    LEARNING = "learning"
    RANDOM = "random"
    # C = forced_fraction * P every step
    FORCED = "forced"


class SpilloverMode(str, Enum):
    NETWORK = "network"
    IDENTITY = "identity"


class SupervisionMode(str, Enum):
    ENDOGENOUS = "endogenous"
    FIXED = "fixed"


class MechanismToggles(BaseModel):
    """Switches that turn single mechanisms of the game off for sensitivity analysis."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    government: GovernmentMode = GovernmentMode.ADAPTIVE
    servants: ServantMode = ServantMode.LEARNING
    forced_fraction: float | None = Field(default=None, ge=0, le=1)
    spillovers: SpilloverMode = SpilloverMode.NETWORK
    # None means: mean positive off-diagonal weight of the replaced network
    identity_weight: float | None = Field(default=None, ge=0)
    supervision: SupervisionMode = SupervisionMode.ENDOGENOUS
    fixed_supervision: float | None = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def check_variant_parameters(self) -> MechanismToggles:
        if self.servants is ServantMode.FORCED and self.forced_fraction is None:
            raise ValueError("servants=forced requires forced_fraction")
        if self.servants is not ServantMode.FORCED and self.forced_fraction is not None:
            raise ValueError("forced_fraction only applies to servants=forced")
        if self.supervision is SupervisionMode.FIXED and self.fixed_supervision is None:
            raise ValueError("supervision=fixed requires fixed_supervision")
        if self.supervision is not SupervisionMode.FIXED and self.fixed_supervision is not None:
            raise ValueError("fixed_supervision only applies to supervision=fixed")
        if self.spillovers is not SpilloverMode.IDENTITY and self.identity_weight is not None:
            raise ValueError("identity_weight only applies to spillovers=identity")
        return self

    @classmethod
    def full_model(cls) -> MechanismToggles:
        return cls()

    @classmethod
    def random_government(cls) -> MechanismToggles:
        return cls(government=GovernmentMode.RANDOM)

    @classmethod
    def random_servants(cls) -> MechanismToggles:
        return cls(servants=ServantMode.RANDOM)

    @classmethod
    def forced_servants(cls, fraction: float) -> MechanismToggles:
        return cls(servants=ServantMode.FORCED, forced_fraction=fraction)

    @classmethod
    def no_network(cls, weight: float | None = None) -> MechanismToggles:
        return cls(spillovers=SpilloverMode.IDENTITY, identity_weight=weight)

    @classmethod
    def fixed_supervision_at(cls, value: float = 0.5) -> MechanismToggles:
        return cls(supervision=SupervisionMode.FIXED, fixed_supervision=value)

    def label(self) -> str:
        parts = []
        if self.government is GovernmentMode.RANDOM:
            parts.append("random-government")
        if self.servants is ServantMode.RANDOM:
            parts.append("random-servants")
        if self.servants is ServantMode.FORCED:
            parts.append(f"forced-servants-{self.forced_fraction:g}")
        if self.spillovers is SpilloverMode.IDENTITY:
            w = "auto" if self.identity_weight is None else f"{self.identity_weight:g}"
            parts.append(f"no-network-{w}")
        if self.supervision is SupervisionMode.FIXED:
            parts.append(f"fixed-supervision-{self.fixed_supervision:g}")
        return "+".join(parts) or "full-model"


def _as_unit_vector(value: Any, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"{name} must lie in [0, 1]")
    arr.setflags(write=False)
    return arr


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    targets: np.ndarray
    initial_indicators: np.ndarray
    budget: float = Field(1.0, gt=0)
    gamma: float = Field(1.0, gt=0)
    epsilon: float = Field(1e-3, gt=0)
    target_tol: float = Field(1e-2, gt=0)
    max_steps: int = Field(10_000, ge=1)
    rule_of_law_idx: int = Field(ge=0)
    control_of_corruption_idx: int = Field(ge=0)
    toggles: MechanismToggles = Field(default_factory=MechanismToggles)
    seed: int = Field(0, ge=0)

    @field_validator("targets", mode="before")
    @classmethod
    def check_targets(cls, v: Any) -> np.ndarray:
        return _as_unit_vector(v, "targets")

    @field_validator("initial_indicators", mode="before")
    @classmethod
    def check_initial(cls, v: Any) -> np.ndarray:
        return _as_unit_vector(v, "initial_indicators")

    @model_validator(mode="after")
    def check_shapes(self) -> SimulationConfig:
        n = self.targets.size
        if self.initial_indicators.size != n:
            raise ValueError(
                f"targets ({n}) and initial_indicators ({self.initial_indicators.size}) differ in length"
            )
        for name in ("rule_of_law_idx", "control_of_corruption_idx"):
            if getattr(self, name) >= n:
                raise ValueError(f"{name}={getattr(self, name)} out of range for {n} indicators")
        return self

    @property
    def n(self) -> int:
        return self.targets.size


@dataclass
class AgentState:
    """Game state at the end of tick ``t``.

    ``allocations`` is the allocation servants spend during tick ``t + 1``; the
    ``*_prev1`` / ``*_prev2`` arrays are the servants' two-step memory.
    """

    t: int
    indicators: np.ndarray
    allocations: np.ndarray
    contributions_prev1: np.ndarray
    contributions_prev2: np.ndarray
    benefits_prev1: np.ndarray
    benefits_prev2: np.ndarray
    detections: np.ndarray


@dataclass
class SimulationTrace:
    """Per-step series of one run; row 0 is the initial state, rows 1..steps the ticks."""

    steps: int
    indicators: np.ndarray
    allocations: np.ndarray
    contributions: np.ndarray
    detections: np.ndarray
    # first tick with |T_i - I_i| < target_tol, -1 if never reached
    ell_i: np.ndarray
    converged: bool
    targets: np.ndarray
    budget: float
    seed: int | None = None
    target_tol: float = 1e-2

    @property
    def n(self) -> int:
        return self.indicators.shape[1]

    @property
    def final_gaps(self) -> np.ndarray:
        return np.abs(self.targets - self.indicators[-1])

    @property
    def targets_met(self) -> bool:
        """Every indicator ended within ``target_tol`` of its target.

        Halting only says the indicators stopped moving; a run whose servants
        divert nearly everything halts with gaps still open.
        """
        return bool(np.all(self.final_gaps < self.target_tol))

    def mean_allocation(self) -> np.ndarray:
        """Inter-temporal mean of the allocations spent in ticks 1..steps."""
        return self.allocations[1 : self.steps + 1].mean(axis=0)

    def effective_ell(self) -> np.ndarray:
        """Per-indicator averaging window: ``ell_i`` where reached, the run length otherwise."""
        return np.where(self.ell_i >= 0, self.ell_i, self.steps)
