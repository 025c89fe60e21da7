from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ppi.analysis.metrics import (
    corruption_level,
    mean_contributions,
    performance_mean,
    standard_error,
)
from ppi.game.simulation import run_simulation
from ppi.models.network import SpilloverNetwork
from ppi.models.simulation import SimulationConfig, SimulationTrace
from ppi.observability.metrics import NONCONVERGED_RUNS, SIMULATION_RUNS, SIMULATION_STEPS

logger = logging.getLogger(__name__)


def derive_seeds(master: int, runs: int, offset: int = 0) -> list[int]:
    """Per-run seeds that depend only on (master, run index)."""
    return [
        int(np.random.SeedSequence([master, offset + m]).generate_state(1)[0]) for m in range(runs)
    ]


@dataclass
class RunSummary:
    seed: int
    steps: int
    converged: bool
    mean_allocation: np.ndarray
    mean_contribution: np.ndarray
    corruption: float
    performance: float
    trace: SimulationTrace | None = None


@dataclass
class EnsembleResult:
    runs: list[RunSummary]
    mean_allocation: np.ndarray
    allocation_stderr: np.ndarray
    mean_contribution: np.ndarray
    mean_corruption: float
    corruption_stderr: float
    mean_performance: float
    nonconverged: int = 0
    seeds: list[int] = field(default_factory=list)

    @property
    def converged_runs(self) -> list[RunSummary]:
        return [r for r in self.runs if r.converged]

    @property
    def any_converged(self) -> bool:
        return self.nonconverged < len(self.runs)


def summarize(trace: SimulationTrace, keep_trace: bool = False) -> RunSummary:
    return RunSummary(
        seed=int(trace.seed or 0),
        steps=trace.steps,
        converged=trace.converged,
        mean_allocation=trace.mean_allocation(),
        mean_contribution=mean_contributions(trace),
        corruption=corruption_level(trace),
        performance=performance_mean(trace),
        trace=trace if keep_trace else None,
    )


def _one_run(config: SimulationConfig, network: SpilloverNetwork, seed: int, keep_trace: bool) -> RunSummary:
    trace = run_simulation(config.model_copy(update={"seed": seed}), network)
    return summarize(trace, keep_trace)


def record_runs(summaries: list[RunSummary], mode: str) -> int:
    """Count finished runs in the process metrics; returns the number that did not halt."""
    for s in summaries:
        SIMULATION_RUNS.labels(mode=mode).inc()
        SIMULATION_STEPS.observe(s.steps)
    nonconverged = sum(not s.converged for s in summaries)
    if nonconverged:
        NONCONVERGED_RUNS.labels(mode=mode).inc(nonconverged)
    return nonconverged


def run_monte_carlo(
    config: SimulationConfig,
    network: SpilloverNetwork,
    runs: int = 1000,
    jobs: int = 1,
    *,
    seeds: list[int] | None = None,
    keep_traces: bool = False,
    mode: str = "full-model",
    record_metrics: bool = True,
) -> EnsembleResult:
    """Independent runs of the game reduced to ensemble means.

    Run ``m`` uses ``seeds[m]`` (derived from ``config.seed`` by default), so the
    result does not depend on ``jobs``. Runs that fail to halt are kept in
    ``runs`` but excluded from every mean; when none halts the means are NaN.
    Callers running inside worker processes pass ``record_metrics=False`` and
    call :func:`record_runs` in the parent.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if seeds is None:
        seeds = derive_seeds(config.seed, runs)
    elif len(seeds) != runs:
        raise ValueError(f"{len(seeds)} seeds for {runs} runs")

    if jobs == 1:
        summaries = [_one_run(config, network, s, keep_traces) for s in seeds]
    else:
        summaries = Parallel(n_jobs=jobs)(delayed(_one_run)(config, network, s, keep_traces) for s in seeds)

    if record_metrics:
        record_runs(summaries, mode)
    done = [s for s in summaries if s.converged]
    nonconverged = len(summaries) - len(done)
    if nonconverged:
        logger.warning(f"{nonconverged}/{len(summaries)} runs did not converge and are excluded ({mode})")
    if not done:
        logger.warning(f"None of {len(summaries)} runs converged within {config.max_steps} steps ({mode})")
        blank = np.full(config.n, np.nan)
        return EnsembleResult(
            runs=list(summaries),
            mean_allocation=blank,
            allocation_stderr=blank.copy(),
            mean_contribution=blank.copy(),
            mean_corruption=float("nan"),
            corruption_stderr=float("nan"),
            mean_performance=float("nan"),
            nonconverged=nonconverged,
            seeds=list(seeds),
        )

    alloc = np.vstack([s.mean_allocation for s in done])
    contrib = np.vstack([s.mean_contribution for s in done])
    corruption = np.array([s.corruption for s in done])
    performance = np.array([s.performance for s in done])
    return EnsembleResult(
        runs=list(summaries),
        mean_allocation=alloc.mean(axis=0),
        allocation_stderr=standard_error(alloc),
        mean_contribution=contrib.mean(axis=0),
        mean_corruption=float(corruption.mean()),
        corruption_stderr=float(standard_error(corruption)),
        mean_performance=float(performance.mean()),
        nonconverged=nonconverged,
        seeds=list(seeds),
    )
