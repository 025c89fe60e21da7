"""Synthetic indicator panels standing in for the non-redistributable survey data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ppi.models.panel import IndicatorPanel

CLUSTER_LEVELS = (0.75, 0.55, 0.4, 0.25)


@dataclass
class SyntheticPanel:
    panel: IndicatorPanel
    gdp_per_capita: np.ndarray
    true_clusters: dict[str, int]


def synthetic_panel(
    countries: int = 20,
    years: int = 11,
    pillars: int = 13,
    per_pillar: int = 6,
    seed: int = 0,
    *,
    corruption_indicator: str | None = "corruption",
    inverted: int = 0,
    pillar_sd: float = 0.01,
    idio_sd: float = 0.003,
) -> SyntheticPanel:
    """Pillar-correlated panel with country clusters at distinct development levels.

    Each pillar of each country follows its own random walk, so yearly changes
    are strongly correlated within a pillar. The first ``inverted`` indicators
    are stored as ``1 - v`` so orientation has something to undo.
    """
    rng = np.random.default_rng(seed)
    k = len(CLUSTER_LEVELS)
    truth = np.arange(countries) % k
    level = np.asarray(CLUSTER_LEVELS)[truth] + rng.normal(0.0, 0.02, countries)

    pillar_of = np.repeat(np.arange(pillars), per_pillar)
    names = [f"p{p + 1:02d}_i{j + 1}" for p in range(pillars) for j in range(per_pillar)]
    pillar_names = {n: f"pillar_{p + 1:02d}" for n, p in zip(names, pillar_of)}
    n_ind = len(names)

    base = level[:, None] + rng.normal(0.0, 0.08, (countries, pillars))[:, pillar_of] + rng.normal(0.0, 0.03, (countries, n_ind))
    growth = rng.uniform(0.004, 0.015, countries)
    t = np.arange(years)
    walk = np.cumsum(rng.normal(0.0, pillar_sd, (countries, years, pillars)), axis=1)[:, :, pillar_of]
    noise = rng.normal(0.0, idio_sd, (countries, years, n_ind))
    values = base[:, None, :] + growth[:, None, None] * t[None, :, None] + walk + noise

    if corruption_indicator is not None:
        names.append(corruption_indicator)
        pillar_names[corruption_indicator] = "governance"
        corr = level[:, None] + 0.02 * t[None, :] + rng.normal(0.0, 0.02, (countries, years))
        values = np.concatenate([values, corr[:, :, None]], axis=2)

    values = np.clip(values, 0.01, 0.99)
    if inverted:
        values[:, :, :inverted] = 1.0 - values[:, :, :inverted]

    gdp = np.exp(8.0 + 3.0 * level[:, None] + 0.02 * t[None, :] + rng.normal(0.0, 0.01, (countries, years)))
    country_ids = [f"C{c + 1:03d}" for c in range(countries)]
    panel = IndicatorPanel(
        countries=country_ids,
        years=[2006 + int(y) for y in t],
        indicators=names,
        values=values,
        pillars=pillar_names,
    )
    return SyntheticPanel(panel=panel, gdp_per_capita=gdp, true_clusters=dict(zip(country_ids, (int(x) + 1 for x in truth))))
