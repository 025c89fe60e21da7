from __future__ import annotations

import logging
import threading
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from ppi.game.ensemble import EnsembleResult, RunSummary, derive_seeds, record_runs, run_monte_carlo
from ppi.models.country import CountrySetup
from ppi.models.reports import GammaGrid
from ppi.models.simulation import MechanismToggles

logger = logging.getLogger(__name__)


def _corruption_ensemble(
    setup: CountrySetup,
    gamma: float,
    runs: int,
    seed: int,
    toggles: MechanismToggles | None,
    record_metrics: bool,
    simulation: dict[str, Any],
) -> EnsembleResult:
    config = setup.with_gamma(gamma).config(toggles=toggles, seed=seed, **simulation)
    return run_monte_carlo(
        config,
        setup.network,
        runs=runs,
        jobs=1,
        seeds=derive_seeds(seed, runs),
        mode="calibration",
        record_metrics=record_metrics,
    )


def simulated_corruption(
    setup: CountrySetup,
    gamma: float,
    runs: int = 100,
    *,
    seed: int = 0,
    toggles: MechanismToggles | None = None,
    **simulation: Any,
) -> float:
    """Monte Carlo mean corruption level of a country at one γ; NaN when no run halts."""
    return _corruption_ensemble(setup, gamma, runs, seed, toggles, True, simulation).mean_corruption


def _table_value(
    setup: CountrySetup, gamma: float, runs: int, seed: int, simulation: dict[str, Any]
) -> tuple[float, list[RunSummary]]:
    """D̄ of one pair and its run summaries; metrics are recorded by the caller."""
    result = _corruption_ensemble(setup, gamma, runs, seed, None, False, simulation)
    if not result.any_converged:
        logger.warning(f"No run of {setup.name} converged at gamma={gamma:g}; pair excluded")
    return result.mean_corruption, result.runs


class CorruptionTable:
    """Memoized ``(country, γ) -> D̄`` lookups shared by the calibration search.

    Every pair uses the same seed list, so values at different γ share their
    random numbers.
    """

    def __init__(self, setups: list[CountrySetup], runs: int = 100, seed: int = 0, **simulation: Any):
        self.setups = {s.name: s for s in setups}
        self.countries = [s.name for s in setups]
        self.runs = runs
        self.seed = seed
        self.simulation = simulation
        self._cache: dict[tuple[str, float], float] = {}
        self._lock = threading.Lock()

    def _compute(self, country: str, gamma: float) -> float:
        value, summaries = _table_value(self.setups[country], gamma, self.runs, self.seed, self.simulation)
        record_runs(summaries, "calibration")
        return value

    def get(self, country: str, gamma: float) -> float:
        key = (country, float(gamma))
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = self._compute(country, gamma)
        with self._lock:
            self._cache.setdefault(key, value)
            return self._cache[key]

    def __len__(self) -> int:
        return len(self._cache)

    def matrix(self, grid: GammaGrid, jobs: int = 1) -> np.ndarray:
        """Countries × grid matrix of D̄, computing missing pairs in parallel."""
        missing = [(c, g) for c in self.countries for g in grid.values if (c, g) not in self._cache]
        if missing:
            logger.info(f"Simulating corruption for {len(missing)} (country, gamma) pairs with {jobs} jobs")
            values = Parallel(n_jobs=jobs)(
                delayed(_table_value)(self.setups[c], g, self.runs, self.seed, self.simulation)
                for c, g in missing
            )
            with self._lock:
                for key, (value, summaries) in zip(missing, values):
                    record_runs(summaries, "calibration")
                    self._cache.setdefault(key, value)
        return np.array([[self._cache[(c, g)] for g in grid.values] for c in self.countries])
