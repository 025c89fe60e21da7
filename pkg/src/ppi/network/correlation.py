from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ppi.errors import EstimationError

logger = logging.getLogger(__name__)

MIN_OBSERVATIONS = 3


@dataclass(frozen=True)
class CorrelationInput:
    """Indicators × years series of one country."""

    series: np.ndarray
    differencing: bool = True
    shrinkage: float = 0.2

    def __post_init__(self) -> None:
        if not 0 <= self.shrinkage <= 1:
            raise EstimationError(f"shrinkage must lie in [0, 1], got {self.shrinkage}")


@dataclass(frozen=True)
class CorrelationResult:
    matrix: np.ndarray
    # indices (into the input rows) kept in ``matrix`` and dropped as constant
    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    data: np.ndarray


def prepare_series(inp: CorrelationInput) -> np.ndarray:
    x = np.asarray(inp.series, dtype=float)
    if x.ndim != 2:
        raise EstimationError(f"series must be indicators × years, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise EstimationError("series contain missing or non-finite values")
    if inp.differencing:
        x = np.diff(x, axis=1)
    if x.shape[1] < MIN_OBSERVATIONS:
        raise EstimationError(
            f"need at least {MIN_OBSERVATIONS} observations after differencing, got {x.shape[1]}"
        )
    return x


def correlation_matrix(inp: CorrelationInput) -> CorrelationResult:
    """Shrunk Pearson correlations ``(1 - λ) R + λ I`` over non-constant rows."""
    x = prepare_series(inp)
    constant = np.ptp(x, axis=1) == 0
    dropped = tuple(int(i) for i in np.flatnonzero(constant))
    kept = tuple(int(i) for i in np.flatnonzero(~constant))
    if dropped:
        logger.info(f"Dropped {len(dropped)} constant series: {list(dropped)}")
    if len(kept) < 2:
        raise EstimationError(f"only {len(kept)} non-constant series left")
    data = x[list(kept)]
    R = np.corrcoef(data)
    R = np.clip((R + R.T) / 2.0, -1.0, 1.0)
    lam = inp.shrinkage
    out = (1.0 - lam) * R + lam * np.eye(len(kept))
    np.fill_diagonal(out, 1.0)
    return CorrelationResult(matrix=out, kept=kept, dropped=dropped, data=data)
