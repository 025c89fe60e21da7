from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ppi.errors import EstimationError
from ppi.models.network import SpilloverNetwork
from ppi.models.panel import IndicatorPanel
from ppi.network.correlation import CorrelationInput, correlation_matrix
from ppi.network.orientation import DEFAULT_TIE_TOL, orient_edges
from ppi.network.tmfg import tmfg
from ppi.observability.metrics import NEGATIVE_EDGES_DROPPED, NETWORKS_ESTIMATED

logger = logging.getLogger(__name__)


@dataclass
class EstimationReport:
    country: str
    dropped_constant: list[str] = field(default_factory=list)
    undirected_edges: int = 0
    directed_edges: int = 0
    negative_dropped: list[tuple[str, str]] = field(default_factory=list)
    ties: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "country": self.country,
            "dropped_constant": list(self.dropped_constant),
            "undirected_edges": self.undirected_edges,
            "directed_edges": self.directed_edges,
            "negative_dropped": [list(e) for e in self.negative_dropped],
            "ties": [list(e) for e in self.ties],
        }


def estimate_series(
    series: np.ndarray,
    labels: tuple[str, ...],
    *,
    country: str = "",
    differencing: bool = True,
    shrinkage: float = 0.2,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> tuple[SpilloverNetwork, EstimationReport]:
    """Correlation, TMFG and orientation over one indicators × years matrix.

    Constant series stay in the network as isolated nodes.
    """
    n = len(labels)
    corr = correlation_matrix(CorrelationInput(series, differencing=differencing, shrinkage=shrinkage))
    if len(corr.kept) < 4:
        raise EstimationError(f"{country or 'series'}: {len(corr.kept)} non-constant indicators, TMFG needs 4")
    W = np.abs(corr.matrix)
    np.fill_diagonal(W, 0.0)
    graph = tmfg(W)
    sub, sub_report = orient_edges(graph, corr.data, tie_tol=tie_tol)

    kept = np.asarray(corr.kept)
    weights = np.zeros((n, n))
    weights[np.ix_(kept, kept)] = sub.weights
    network = SpilloverNetwork(weights, tuple(labels))

    report = EstimationReport(
        country=country,
        dropped_constant=[labels[i] for i in corr.dropped],
        undirected_edges=graph.edge_count,
        directed_edges=sub_report.directed_edges,
        negative_dropped=[(labels[kept[i]], labels[kept[j]]) for i, j in sub_report.negative_dropped],
        ties=[(labels[kept[i]], labels[kept[j]]) for i, j in sub_report.ties],
    )
    logger.info(
        f"Estimated network {country}: {report.undirected_edges} undirected edges, "
        f"{report.directed_edges} kept, {len(report.negative_dropped)} negative dropped"
    )
    return network, report


def estimate_network(
    panel: IndicatorPanel,
    country: str,
    *,
    differencing: bool = True,
    shrinkage: float = 0.2,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> tuple[SpilloverNetwork, EstimationReport]:
    network, report = estimate_series(
        panel.series(country),
        tuple(panel.indicators),
        country=country,
        differencing=differencing,
        shrinkage=shrinkage,
        tie_tol=tie_tol,
    )
    NETWORKS_ESTIMATED.inc()
    if report.negative_dropped:
        NEGATIVE_EDGES_DROPPED.inc(len(report.negative_dropped))
    return network, report


def estimate_all(
    panel: IndicatorPanel,
    countries: list[str] | None = None,
    *,
    jobs: int = 1,
    differencing: bool = True,
    shrinkage: float = 0.2,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> dict[str, tuple[SpilloverNetwork, EstimationReport]]:
    countries = list(panel.countries) if countries is None else countries
    for c in countries:
        panel.country_index(c)
    kwargs = {"differencing": differencing, "shrinkage": shrinkage, "tie_tol": tie_tol}
    results = Parallel(n_jobs=jobs)(
        delayed(estimate_series)(panel.series(c), tuple(panel.indicators), country=c, **kwargs)
        for c in countries
    )
    for _, report in results:
        NETWORKS_ESTIMATED.inc()
        if report.negative_dropped:
            NEGATIVE_EDGES_DROPPED.inc(len(report.negative_dropped))
    return dict(zip(countries, results))
