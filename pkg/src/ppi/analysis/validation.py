"""Comparisons between simulated ensembles and the observed panel."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from scipy import stats

from ppi.analysis.metrics import spearman_test, standard_error, weighted_jaccard
from ppi.errors import DomainError
from ppi.game.ensemble import EnsembleResult
from ppi.models.network import SpilloverNetwork
from ppi.models.panel import ClusterAssignment, IndicatorPanel
from ppi.models.reports import AllocationProfile

logger = logging.getLogger(__name__)


def empirical_levels(panel: IndicatorPanel, corruption_indicator: str) -> pd.DataFrame:
    """Observed corruption and performance per country from a normalized panel.

    Corruption is ``1 - mean`` of the (higher-is-better) corruption indicator
    over all years; performance is the mean of every other indicator.
    """
    k = panel.indicator_index(corruption_indicator)
    rest = [i for i in range(len(panel.indicators)) if i != k]
    if not rest:
        raise DomainError("panel has no indicators besides the corruption indicator")
    corruption = 1.0 - panel.values[:, :, k].mean(axis=1)
    performance = panel.values[:, :, rest].mean(axis=(1, 2))
    return pd.DataFrame(
        {"empirical_corruption": corruption, "empirical_performance": performance},
        index=pd.Index(panel.countries, name="country"),
    )


def regression_r_squared(x: ArrayLike, y: ArrayLike) -> float:
    """R² of the least-squares line of ``y`` on ``x``."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.size < 2:
        raise DomainError("regression needs two vectors of equal length >= 2")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise DomainError("regression is undefined for a constant vector")
    return float(stats.linregress(xa, ya).rvalue ** 2)


def cumulative_series(empirical: Mapping[str, float], simulated: Mapping[str, float]) -> pd.DataFrame:
    """Countries sorted by empirical corruption with both levels cumulated and scaled to end at 1."""
    countries = sorted(empirical, key=lambda c: (empirical[c], c))
    emp = np.cumsum([empirical[c] for c in countries])
    sim = np.cumsum([simulated[c] for c in countries])
    return pd.DataFrame(
        {
            "country": countries,
            "empirical_cumulative": emp / emp[-1] if emp[-1] else emp,
            "simulated_cumulative": sim / sim[-1] if sim[-1] else sim,
        }
    )


@dataclass
class CorruptionPerformance:
    table: pd.DataFrame
    model_spearman: float
    model_pvalue: float
    empirical_spearman: float
    empirical_pvalue: float
    r_squared: float

    def summary(self) -> dict[str, float]:
        return {
            "model_spearman": self.model_spearman,
            "model_pvalue": self.model_pvalue,
            "empirical_spearman": self.empirical_spearman,
            "empirical_pvalue": self.empirical_pvalue,
            "r_squared": self.r_squared,
        }


def _safe_spearman(x: np.ndarray, y: np.ndarray, label: str) -> tuple[float, float]:
    try:
        return spearman_test(x, y)
    except DomainError as e:
        logger.warning(f"{label} Spearman undefined: {e}")
        return float("nan"), float("nan")


def corruption_performance_table(
    ensembles: Mapping[str, EnsembleResult],
    panel: IndicatorPanel,
    corruption_indicator: str,
) -> CorruptionPerformance:
    """Per-country simulated and observed (corruption, performance) pairs with their rank correlations."""
    countries = list(ensembles)
    observed = empirical_levels(panel, corruption_indicator).loc[countries]
    table = pd.DataFrame(
        {
            "country": countries,
            "simulated_corruption": [ensembles[c].mean_corruption for c in countries],
            "simulated_corruption_stderr": [ensembles[c].corruption_stderr for c in countries],
            "simulated_performance": [ensembles[c].mean_performance for c in countries],
            "empirical_corruption": observed["empirical_corruption"].to_numpy(),
            "empirical_performance": observed["empirical_performance"].to_numpy(),
        }
    )
    model = _safe_spearman(
        table["simulated_corruption"].to_numpy(), table["simulated_performance"].to_numpy(), "model"
    )
    empirical = _safe_spearman(
        table["empirical_corruption"].to_numpy(), table["empirical_performance"].to_numpy(), "empirical"
    )
    try:
        r2 = regression_r_squared(table["simulated_corruption"], table["empirical_corruption"])
    except DomainError as e:
        logger.warning(f"Corruption R² undefined: {e}")
        r2 = float("nan")
    return CorruptionPerformance(
        table=table,
        model_spearman=model[0],
        model_pvalue=model[1],
        empirical_spearman=empirical[0],
        empirical_pvalue=empirical[1],
        r_squared=r2,
    )


def network_similarity_matrix(networks: Mapping[str, SpilloverNetwork], order: Sequence[str] | None = None) -> pd.DataFrame:
    """Pairwise weighted Jaccard of adjacency matrices; two empty networks compare as NaN."""
    names = list(order) if order is not None else list(networks)
    m = len(names)
    out = np.eye(m)
    for a in range(m):
        for b in range(a + 1, m):
            try:
                v = weighted_jaccard(networks[names[a]].weights, networks[names[b]].weights)
            except DomainError:
                v = np.nan
            out[a, b] = out[b, a] = v
    return pd.DataFrame(out, index=names, columns=names)


def cluster_adjacency(networks: Mapping[str, SpilloverNetwork], assignment: ClusterAssignment) -> dict[int, np.ndarray]:
    """Sum of the member countries' adjacency matrices per cluster."""
    out: dict[int, np.ndarray] = {}
    for label in range(1, assignment.k + 1):
        members = [c for c in assignment.members(label) if c in networks]
        if members:
            out[label] = np.sum([networks[c].weights for c in members], axis=0)
    return out


def cluster_pillar_table(
    panel: IndicatorPanel,
    assignment: ClusterAssignment,
    profiles: Mapping[str, AllocationProfile] | None = None,
) -> pd.DataFrame:
    """Cluster × pillar means of indicator levels and allocation totals with cross-country standard errors."""
    levels = panel.time_average()
    pillar_idx = panel.pillar_members()
    rows = []
    for label in range(1, assignment.k + 1):
        members = assignment.members(label)
        for pillar, idx in pillar_idx.items():
            ind = np.array([levels[panel.country_index(c), idx].mean() for c in members])
            row = {
                "cluster": label,
                "pillar": pillar,
                "countries": len(members),
                "indicator_mean": float(ind.mean()),
                "indicator_stderr": float(standard_error(ind)),
            }
            if profiles is not None:
                alloc = np.array([profiles[c].pillar_totals().get(pillar, 0.0) for c in members if c in profiles])
                row["allocation_mean"] = float(alloc.mean()) if alloc.size else np.nan
                row["allocation_stderr"] = float(standard_error(alloc)) if alloc.size else np.nan
            rows.append(row)
    return pd.DataFrame(rows)
