from __future__ import annotations

import numpy as np
import pytest

from ppi.analysis.validation import (
    cluster_adjacency,
    cluster_pillar_table,
    corruption_performance_table,
    cumulative_series,
    empirical_levels,
    network_similarity_matrix,
    regression_r_squared,
)
from ppi.errors import DomainError
from ppi.game.ensemble import EnsembleResult
from ppi.models import SpilloverNetwork
from ppi.models.panel import ClusterAssignment, IndicatorPanel
from ppi.models.reports import AllocationProfile


def _panel() -> IndicatorPanel:
    # corruption indicator is higher-is-better (control of diversion)
    values = np.array(
        [
            [[0.2, 0.9], [0.4, 0.7]],
            [[0.6, 0.5], [0.8, 0.3]],
            [[0.9, 0.1], [1.0, 0.1]],
        ]
    )
    return IndicatorPanel(["A", "B", "C"], [2000, 2001], ["x", "corruption"], values, pillars={"x": "econ", "corruption": "gov"})


def _ensemble(corruption: float, performance: float) -> EnsembleResult:
    return EnsembleResult(
        runs=[],
        mean_allocation=np.array([0.5, 0.5]),
        allocation_stderr=np.zeros(2),
        mean_contribution=np.array([0.4, 0.4]),
        mean_corruption=corruption,
        corruption_stderr=0.01,
        mean_performance=performance,
    )


def test_empirical_levels():
    levels = empirical_levels(_panel(), "corruption")
    assert list(levels.index) == ["A", "B", "C"]
    np.testing.assert_allclose(levels["empirical_corruption"], [0.2, 0.6, 0.9])
    np.testing.assert_allclose(levels["empirical_performance"], [0.3, 0.7, 0.95])


def test_regression_r_squared():
    assert regression_r_squared([1, 2, 3, 4], [3, 5, 7, 9]) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        regression_r_squared([1, 1, 1], [1, 2, 3])
    with pytest.raises(DomainError):
        regression_r_squared([1], [1])


def test_cumulative_series_ends_at_one():
    cum = cumulative_series({"A": 0.3, "B": 0.1, "C": 0.6}, {"A": 2.0, "B": 1.0, "C": 1.0})
    assert list(cum["country"]) == ["B", "A", "C"]
    np.testing.assert_allclose(cum["empirical_cumulative"], [0.1, 0.4, 1.0])
    np.testing.assert_allclose(cum["simulated_cumulative"], [0.25, 0.75, 1.0])


def test_corruption_performance_table():
    ensembles = {"A": _ensemble(0.3, 0.2), "B": _ensemble(0.2, 0.5), "C": _ensemble(0.1, 0.9)}
    result = corruption_performance_table(ensembles, _panel(), "corruption")
    assert list(result.table["country"]) == ["A", "B", "C"]
    assert result.model_spearman == pytest.approx(-1.0)
    assert result.empirical_spearman == pytest.approx(1.0)
    assert 0.0 <= result.r_squared <= 1.0
    assert set(result.summary()) == {"model_spearman", "model_pvalue", "empirical_spearman", "empirical_pvalue", "r_squared"}


def test_network_similarity():
    a = SpilloverNetwork(np.array([[0.0, 1.0], [0.0, 0.0]]))
    b = SpilloverNetwork(np.array([[0.0, 0.5], [0.5, 0.0]]))
    sim = network_similarity_matrix({"a": a, "b": b, "e": SpilloverNetwork.empty(2), "f": SpilloverNetwork.empty(2)})
    assert sim.at["a", "a"] == 1.0
    assert sim.at["a", "b"] == pytest.approx(0.5 / 1.5)
    assert sim.at["a", "e"] == 0.0
    assert np.isnan(sim.at["e", "f"])


def test_cluster_adjacency_sums_members():
    a = SpilloverNetwork(np.array([[0.0, 1.0], [0.0, 0.0]]))
    b = SpilloverNetwork(np.array([[0.0, 0.5], [0.5, 0.0]]))
    assignment = ClusterAssignment(labels={"a": 1, "b": 1, "c": 2}, k=2)
    out = cluster_adjacency({"a": a, "b": b}, assignment)
    assert list(out) == [1]
    np.testing.assert_allclose(out[1], [[0.0, 1.5], [0.5, 0.0]])


def test_cluster_pillar_table():
    panel = _panel()
    assignment = ClusterAssignment(labels={"A": 2, "B": 2, "C": 1}, k=2)
    profiles = {
        c: AllocationProfile(
            country=c, indicators=("x", "corruption"), mean=(0.75, 0.25), stderr=(0.0, 0.0), pillars=panel.pillars, budget=1.0, runs=1
        )
        for c in panel.countries
    }
    table = cluster_pillar_table(panel, assignment, profiles)
    row = table[(table["cluster"] == 2) & (table["pillar"] == "econ")].iloc[0]
    assert row["countries"] == 2
    assert row["indicator_mean"] == pytest.approx(0.5)
    assert row["allocation_mean"] == pytest.approx(0.75)
    assert len(table) == 4
