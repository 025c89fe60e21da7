from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ppi.errors import DomainError
from ppi.models.network import SpilloverNetwork
from ppi.models.simulation import MechanismToggles, SimulationConfig


@dataclass(frozen=True, eq=False)
class CountrySetup:
    """Everything the game needs to simulate one country."""

    name: str
    network: SpilloverNetwork
    initial: np.ndarray
    targets: np.ndarray
    rule_of_law_idx: int
    control_of_corruption_idx: int
    indicators: tuple[str, ...]
    budget: float = 1.0
    gamma: float = 1.0
    pillars: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.network.n
        if len(self.indicators) != n or np.size(self.initial) != n or np.size(self.targets) != n:
            raise DomainError(f"{self.name}: network, indicators, initials and targets differ in size")

    def with_gamma(self, gamma: float) -> CountrySetup:
        return replace(self, gamma=float(gamma))

    def config(
        self,
        *,
        toggles: MechanismToggles | None = None,
        seed: int = 0,
        **simulation: Any,
    ) -> SimulationConfig:
        """Build a :class:`SimulationConfig`; ``simulation`` overrides epsilon, max_steps, etc."""
        params: dict[str, Any] = {"budget": self.budget, "gamma": self.gamma}
        params.update({k: v for k, v in simulation.items() if v is not None})
        return SimulationConfig(
            targets=self.targets,
            initial_indicators=self.initial,
            rule_of_law_idx=self.rule_of_law_idx,
            control_of_corruption_idx=self.control_of_corruption_idx,
            toggles=toggles or MechanismToggles(),
            seed=seed,
            **params,
        )
