from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from ppi.errors import DomainError
from ppi.models.simulation import SimulationTrace


def _window_means(series: np.ndarray, windows: np.ndarray) -> np.ndarray:
    """Per-column mean of rows ``1..w``; a zero window yields row 0."""
    cums = np.cumsum(series[1:], axis=0)
    cols = np.arange(series.shape[1])
    out = series[0].astype(float).copy()
    pos = windows > 0
    out[pos] = cums[windows[pos] - 1, cols[pos]] / windows[pos]
    return out


def performance_mean(trace: SimulationTrace) -> float:
    """Average over issues of each indicator's mean level up to its own convergence step."""
    return float(_window_means(trace.indicators, trace.effective_ell()).mean())


def mean_contributions(trace: SimulationTrace) -> np.ndarray:
    """Per-issue mean contribution over the issue's convergence window."""
    return _window_means(trace.contributions, trace.effective_ell())


def corruption_level(trace: SimulationTrace) -> float:
    """Diverted funds summed over ticks ``1..steps`` and issues, scaled by ``N * B``."""
    diverted = trace.allocations[1 : trace.steps + 1] - trace.contributions[1 : trace.steps + 1]
    return float(diverted.sum() / (trace.n * trace.budget))


def weighted_jaccard(A: ArrayLike, B: ArrayLike) -> float:
    a = np.asarray(A, dtype=float)
    b = np.asarray(B, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"shapes differ: {a.shape} vs {b.shape}")
    if np.any(a < 0) or np.any(b < 0):
        raise DomainError("weighted Jaccard needs nonnegative entries")
    den = np.maximum(a, b).sum()
    if den == 0:
        raise DomainError("weighted Jaccard is undefined for two all-zero inputs")
    return float(np.minimum(a, b).sum() / den)


def top_k(values: ArrayLike, k: int) -> np.ndarray:
    """Indices of the ``k`` largest values; ties go to the lower index."""
    v = np.asarray(values, dtype=float)
    if v.size < k:
        raise DomainError(f"need at least {k} issues, got {v.size}")
    return np.argsort(-v, kind="stable")[:k]


def top_k_jaccard(a: ArrayLike, b: ArrayLike, k: int = 10) -> float:
    if np.shape(a) != np.shape(b):
        raise DomainError("profiles cover different issue sets")
    sa = set(top_k(a, k).tolist())
    sb = set(top_k(b, k).tolist())
    return len(sa & sb) / len(sa | sb)


def top10_jaccard(a: ArrayLike, b: ArrayLike) -> float:
    return top_k_jaccard(a, b, 10)


def _check_pair(x: ArrayLike, y: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise DomainError("spearman needs two vectors of equal length")
    if xa.size < 2:
        raise DomainError("spearman needs at least two observations")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise DomainError("spearman is undefined for a constant vector")
    return xa, ya


def spearman(x: ArrayLike, y: ArrayLike) -> float:
    """Pearson correlation of average ranks."""
    xa, ya = _check_pair(x, y)
    rx = stats.rankdata(xa)
    ry = stats.rankdata(ya)
    return float(np.corrcoef(rx, ry)[0, 1])


def spearman_test(x: ArrayLike, y: ArrayLike) -> tuple[float, float]:
    """Spearman coefficient and its two-sided p-value."""
    xa, ya = _check_pair(x, y)
    res = stats.spearmanr(xa, ya)
    return float(res.statistic), float(res.pvalue)


def r_squared(observed: ArrayLike, predicted: ArrayLike) -> float:
    o = np.asarray(observed, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if o.shape != p.shape:
        raise DomainError("observed and predicted differ in length")
    ss_tot = ((o - o.mean()) ** 2).sum()
    if ss_tot == 0:
        raise DomainError("R² is undefined for constant observations")
    return float(1.0 - ((o - p) ** 2).sum() / ss_tot)


def standard_error(samples: ArrayLike, axis: int = 0) -> np.ndarray:
    s = np.asarray(samples, dtype=float)
    m = s.shape[axis]
    if m < 2:
        return np.zeros(np.delete(s.shape, axis))
    return s.std(axis=axis, ddof=1) / np.sqrt(m)
