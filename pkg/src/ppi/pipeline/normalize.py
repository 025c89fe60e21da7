from __future__ import annotations

import logging

import numpy as np

from ppi.errors import DomainError
from ppi.models.panel import IndicatorFlags, IndicatorPanel

logger = logging.getLogger(__name__)

LOW_MEAN = 0.2
HIGH_MEAN = 0.8
UPPER_PERCENTILE = 96
LOWER_PERCENTILE = 4


def normalize_indicator(values: np.ndarray, skew_rule: bool = True, name: str = "indicator") -> tuple[np.ndarray, bool]:
    """Pooled min-max scaling with the percentile rule for skewed indicators.

    Returns the scaled values and whether the percentile rule fired.
    """
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{name}: values must be finite")
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        raise DomainError(f"{name}: constant indicator cannot be normalized")
    x = (v - lo) / (hi - lo)
    if not skew_rule:
        return x, False
    m = x.mean()
    if m < LOW_MEAN:
        cap = float(np.percentile(v, UPPER_PERCENTILE))
        if cap > lo:
            return np.clip((v - lo) / (cap - lo), 0.0, 1.0), True
    elif m > HIGH_MEAN:
        floor = float(np.percentile(v, LOWER_PERCENTILE))
        if hi > floor:
            return np.clip((v - floor) / (hi - floor), 0.0, 1.0), True
    return x, False


def orient_indicator(values: np.ndarray, gdp_per_capita: np.ndarray) -> tuple[np.ndarray, bool]:
    """Invert ``v -> 1 - v`` when the indicator correlates negatively with GDP per capita."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(gdp_per_capita, dtype=float)
    if v.shape != g.shape:
        raise DomainError(f"indicator shape {v.shape} does not match GDP shape {g.shape}")
    if np.ptp(v) == 0 or np.ptp(g) == 0:
        return v, False
    corr = np.corrcoef(v.reshape(-1), g.reshape(-1))[0, 1]
    if corr < 0:
        return 1.0 - v, True
    return v, False


def normalize_panel(
    panel: IndicatorPanel,
    gdp_per_capita: np.ndarray | None = None,
    skew_rule: bool = True,
) -> IndicatorPanel:
    """Normalize every indicator over the pooled country-year sample, then orient it."""
    out = np.empty_like(panel.values)
    flags: dict[str, IndicatorFlags] = {}
    for k, name in enumerate(panel.indicators):
        x, skewed = normalize_indicator(panel.values[:, :, k], skew_rule=skew_rule, name=name)
        inverted = False
        if gdp_per_capita is not None:
            x, inverted = orient_indicator(x, gdp_per_capita)
        out[:, :, k] = x
        flags[name] = IndicatorFlags(skew_corrected=skewed, inverted=inverted)
    n_skew = sum(f.skew_corrected for f in flags.values())
    n_inv = sum(f.inverted for f in flags.values())
    logger.info(f"Normalized {len(flags)} indicators ({n_skew} skew-corrected, {n_inv} inverted)")
    return IndicatorPanel(
        countries=list(panel.countries),
        years=list(panel.years),
        indicators=list(panel.indicators),
        values=out,
        pillars=dict(panel.pillars),
        flags=flags,
    )
