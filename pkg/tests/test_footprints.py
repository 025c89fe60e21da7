from __future__ import annotations

import numpy as np
import pytest

from ppi.analysis.footprints import candidates_above, footprints
from ppi.analysis.retrospective import retrospective
from ppi.errors import DomainError
from ppi.models.panel import ClusterAssignment
from ppi.models.reports import ProfileMode


def test_candidates_come_from_the_cluster_above():
    assignment = ClusterAssignment(labels={"A": 1, "B": 1, "C": 2, "D": 3}, k=3)
    assert candidates_above(assignment, "C") == ["A", "B"]
    assert candidates_above(assignment, "D") == ["C"]
    assert candidates_above(assignment, "A") == []


def test_no_candidates(demo_setup):
    profile, _ = retrospective(demo_setup, runs=1, seed=0)
    with pytest.raises(DomainError):
        footprints(demo_setup, profile, {}, runs=1)


def test_footprint_edges(demo_setup):
    profile, _ = retrospective(demo_setup, runs=2, seed=0)
    T = demo_setup.targets
    candidates = {
        "near": np.minimum(T + 0.02, 1.0),
        "far": np.maximum(T, np.minimum(T + 0.1, 0.95)),
    }
    report = footprints(demo_setup, profile, candidates, runs=2, seed=1)
    assert [e.target for e in report.edges] == ["near", "far"]
    assert report.trivial_target == "near"
    assert report.most_feasible in candidates
    for edge in report.edges:
        assert edge.follower == "demo"
        assert 0.0 <= edge.feasibility <= 1.0
    for target, p in report.profiles.items():
        assert p.mode is ProfileMode.FOOTPRINT
        assert p.target_country == target
        assert sum(p.mean) == pytest.approx(demo_setup.budget, abs=1e-9)


def test_candidates_without_a_converged_run_are_dropped(demo_setup):
    profile, _ = retrospective(demo_setup, runs=2, seed=0)
    T = demo_setup.targets
    report = footprints(
        demo_setup, profile, {"near": np.minimum(T + 0.02, 1.0)}, runs=2, seed=1, max_steps=1, epsilon=1e-15
    )
    assert report.edges == []
    assert report.profiles == {}
    assert report.most_feasible is None
    assert report.trivial_target is None
