from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ppi.errors import DomainError
from ppi.models.reports import CalibrationResult, GammaGrid

logger = logging.getLogger(__name__)


def ratios_method(
    countries: Sequence[str],
    grid: GammaGrid,
    empirical: dict[str, float],
    table: np.ndarray,
    columns: Sequence[int] | None = None,
) -> CalibrationResult:
    """Classify countries over the candidate γ values by relative corruption.

    For every reference country ``r`` (with nonzero empirical corruption) and
    reference γ, each other country takes the γ whose simulated ratio
    ``D_e / D_r`` is closest to the empirical ratio ``I_e / I_r``. The
    (reference, γ) pair with the lowest mean squared error over all countries
    wins; earlier references and smaller γ win ties.

    ``table[c, g]`` is the simulated corruption of country ``c`` at
    ``grid.values[g]``; ``columns`` restricts the search to a subset of the grid.
    """
    S = len(countries)
    table = np.asarray(table, dtype=float)
    if table.shape != (S, len(grid)):
        raise DomainError(f"corruption table has shape {table.shape}, expected {(S, len(grid))}")
    cols = np.arange(len(grid)) if columns is None else np.asarray(sorted(columns))
    if cols.size == 0:
        raise DomainError("empty γ subset")
    sub = table[:, cols]
    I = np.array([empirical[c] for c in countries], dtype=float)

    best: tuple[float, int, int, np.ndarray] | None = None
    for r in range(S):
        if I[r] == 0:
            logger.debug(f"Skipping reference {countries[r]}: empirical corruption is zero")
            continue
        target = I / I[r]
        for gi in range(cols.size):
            D_r = sub[r, gi]
            if not np.isfinite(D_r) or D_r == 0:
                continue
            gaps = np.abs(target[:, None] - sub / D_r)
            gaps = np.where(np.isfinite(gaps), gaps, np.inf)
            pick = np.argmin(gaps, axis=1)
            err = gaps[np.arange(S), pick]
            pick[r] = gi
            err[r] = 0.0
            if not np.all(np.isfinite(err)):
                continue
            mse = float(np.mean(err**2))
            if best is None or mse < best[0]:
                best = (mse, r, gi, pick.copy())

    if best is None:
        raise DomainError("no usable reference country (all empirical or simulated levels are zero)")
    mse, r, gi, pick = best
    gammas = [grid.values[cols[p]] for p in pick]
    assignment = dict(zip(countries, gammas))
    return CalibrationResult(
        assignment=assignment,
        reference_country=countries[r],
        reference_gamma=grid.values[cols[gi]],
        mse=mse,
        distinct_count=len(set(gammas)),
        gammas=tuple(sorted(set(gammas))),
    )


def homogeneous_mse(
    countries: Sequence[str], grid: GammaGrid, empirical: dict[str, float], table: np.ndarray
) -> float:
    """Best MSE when every country shares one γ."""
    best = np.inf
    for g in range(len(grid)):
        best = min(best, ratios_method(countries, grid, empirical, table, columns=[g]).mse)
    return float(best)
