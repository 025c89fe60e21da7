from __future__ import annotations

import logging
from typing import Any

import numpy as np

from ppi.analysis.metrics import spearman
from ppi.errors import DomainError
from ppi.game.ensemble import EnsembleResult, run_monte_carlo
from ppi.models.country import CountrySetup
from ppi.models.network import SpilloverNetwork
from ppi.models.panel import IndicatorPanel
from ppi.models.reports import AllocationProfile, ProfileMode
from ppi.models.simulation import MechanismToggles

logger = logging.getLogger(__name__)


def country_setup(
    panel: IndicatorPanel,
    country: str,
    network: SpilloverNetwork,
    *,
    rule_of_law: str,
    control_of_corruption: str,
    budget: float = 1.0,
    gamma: float = 1.0,
) -> CountrySetup:
    """First observed year as initial conditions, last observed year as targets."""
    if network.n != len(panel.indicators):
        raise DomainError(f"{country}: network has {network.n} nodes, panel has {len(panel.indicators)} indicators")
    return CountrySetup(
        name=country,
        network=network,
        initial=panel.first_year(country),
        targets=panel.last_year(country),
        rule_of_law_idx=panel.indicator_index(rule_of_law),
        control_of_corruption_idx=panel.indicator_index(control_of_corruption),
        indicators=tuple(panel.indicators),
        budget=budget,
        gamma=gamma,
        pillars=dict(panel.pillars),
    )


def allocation_profile(
    setup: CountrySetup,
    ensemble: EnsembleResult,
    mode: ProfileMode = ProfileMode.RETROSPECTIVE,
    target_country: str | None = None,
) -> AllocationProfile:
    return AllocationProfile(
        country=setup.name,
        mode=mode,
        target_country=target_country,
        indicators=setup.indicators,
        mean=tuple(float(x) for x in ensemble.mean_allocation),
        stderr=tuple(float(x) for x in ensemble.allocation_stderr),
        pillars=setup.pillars,
        budget=setup.budget,
        runs=len(ensemble.runs) - ensemble.nonconverged,
        nonconverged=ensemble.nonconverged,
    )


def retrospective(
    setup: CountrySetup,
    runs: int = 1000,
    *,
    seed: int = 0,
    jobs: int = 1,
    toggles: MechanismToggles | None = None,
    **simulation: Any,
) -> tuple[AllocationProfile, EnsembleResult]:
    """Infer the allocation profile that carried a country from its first to its last observation."""
    config = setup.config(toggles=toggles, seed=seed, **simulation)
    ensemble = run_monte_carlo(config, setup.network, runs=runs, jobs=jobs, mode="retrospective")
    logger.info(f"Retrospective {setup.name}: {runs} runs, {ensemble.nonconverged} non-converged")
    return allocation_profile(setup, ensemble), ensemble


def rank_stability(profiles: list[np.ndarray]) -> float:
    """Smallest pairwise Spearman correlation among profiles of one country."""
    if len(profiles) < 2:
        return 1.0
    worst = 1.0
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            worst = min(worst, spearman(profiles[i], profiles[j]))
    return worst
