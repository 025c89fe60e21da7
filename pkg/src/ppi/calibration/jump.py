from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Generic, Mapping, Sequence, TypeVar

import numpy as np

from ppi.calibration.ratios import ratios_method
from ppi.errors import DomainError
from ppi.models.reports import CalibrationResult, GammaGrid

logger = logging.getLogger(__name__)

T = TypeVar("T")

# MSE at or below this counts as a perfect fit
ZERO_MSE = 1e-12


@dataclass
class JumpResult(Generic[T]):
    h_star: int
    selected: T | None
    sizes: list[int]
    mse: list[float]
    inverse_rmse: list[float]
    jumps: list[float]


def jump_method(table: Mapping[int, float | tuple[float, T]], zero_tol: float = ZERO_MSE) -> JumpResult[T]:
    """Pick the number of distinct values with the largest jump in ``MSE^(-1/2)``.

    ``table`` maps a size ``h`` to its best MSE, optionally paired with the set
    that achieved it. The MSE sequence is first reduced to its non-increasing
    envelope; ``MSE_0^(-1/2)`` is taken as 0.
    """
    if not table:
        raise DomainError("jump method needs at least one (size, MSE) entry")
    sizes = sorted(table)
    entries = [table[h] if isinstance(table[h], tuple) else (table[h], None) for h in sizes]
    raw = np.array([float(e[0]) for e in entries])  # type: ignore[index]
    if np.any(raw < 0) or np.any(np.isnan(raw)):
        raise DomainError("MSE values must be nonnegative numbers")
    env = np.minimum.accumulate(raw)
    env = np.where(env <= zero_tol, 0.0, env)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(env == 0, np.inf, env ** -0.5)
        jumps = np.diff(np.concatenate([[0.0], inv]))
    k = int(np.nanargmax(jumps))
    logger.info(f"Jump method: h*={sizes[k]} over sizes {sizes}")
    return JumpResult(
        h_star=sizes[k],
        selected=entries[k][1],  # type: ignore[index]
        sizes=sizes,
        mse=[float(x) for x in raw],
        inverse_rmse=[float(x) for x in inv],
        jumps=[float(x) for x in jumps],
    )


@dataclass
class SubsetSearch:
    """Best ratios-method fit found per number of distinct γ values."""

    best: dict[int, CalibrationResult] = field(default_factory=dict)
    evaluated: int = 0

    def offer(self, result: CalibrationResult) -> None:
        self.evaluated += 1
        h = result.distinct_count
        current = self.best.get(h)
        if current is None or result.mse < current.mse:
            self.best[h] = result

    def table(self) -> dict[int, tuple[float, CalibrationResult]]:
        return {h: (r.mse, r) for h, r in sorted(self.best.items())}


def sample_subsets(
    countries: Sequence[str],
    grid: GammaGrid,
    empirical: dict[str, float],
    table: np.ndarray,
    samples: int = 10_000,
    seed: int = 0,
) -> SubsetSearch:
    """Random search over γ subsets, recording the best fit for each distinct count.

    The full grid and every singleton are always evaluated before ``samples``
    random subsets of uniformly drawn size.
    """
    G = len(grid)
    search = SubsetSearch()
    search.offer(ratios_method(countries, grid, empirical, table))
    for g in range(G):
        try:
            search.offer(ratios_method(countries, grid, empirical, table, columns=[g]))
        except DomainError:
            continue
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        size = int(rng.integers(1, G + 1))
        cols = np.sort(rng.choice(G, size=size, replace=False))
        try:
            search.offer(ratios_method(countries, grid, empirical, table, columns=cols))
        except DomainError:
            continue
    logger.info(f"Sampled {search.evaluated} γ subsets; sizes found: {sorted(search.best)}")
    return search


def calibrate_gammas(
    countries: Sequence[str],
    grid: GammaGrid,
    empirical: dict[str, float],
    table: np.ndarray,
    samples: int = 10_000,
    seed: int = 0,
) -> tuple[CalibrationResult, JumpResult[CalibrationResult], SubsetSearch]:
    search = sample_subsets(countries, grid, empirical, table, samples=samples, seed=seed)
    jump = jump_method(search.table())
    if jump.selected is None:
        raise DomainError("jump method selected a size with no stored fit")
    return jump.selected, jump, search
