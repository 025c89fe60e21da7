from __future__ import annotations

import numpy as np
import pytest

from ppi.analysis.retrospective import country_setup, rank_stability, retrospective
from ppi.errors import DomainError
from ppi.models import SpilloverNetwork
from ppi.models.reports import ProfileMode


def test_setup_uses_first_and_last_year(synthetic):
    panel = synthetic.panel
    net = SpilloverNetwork.empty(len(panel.indicators))
    setup = country_setup(panel, "C001", net, rule_of_law="p01_i1", control_of_corruption="p02_i1", budget=2.0)
    np.testing.assert_array_equal(setup.initial, panel.values[0, 0])
    np.testing.assert_array_equal(setup.targets, panel.values[0, -1])
    assert setup.rule_of_law_idx == panel.indicator_index("p01_i1")
    assert setup.budget == 2.0


def test_setup_size_mismatch(synthetic):
    with pytest.raises(DomainError):
        country_setup(
            synthetic.panel, "C001", SpilloverNetwork.empty(3), rule_of_law="p01_i1", control_of_corruption="p02_i1"
        )


def test_profile_totals_add_up_to_budget(demo_setup):
    profile, ensemble = retrospective(demo_setup, runs=3, seed=0)
    assert profile.mode is ProfileMode.RETROSPECTIVE
    assert profile.runs + profile.nonconverged == 3
    assert sum(profile.mean) == pytest.approx(demo_setup.budget, abs=1e-9)
    assert sum(profile.pillar_totals().values()) == pytest.approx(demo_setup.budget, abs=1e-9)
    assert set(profile.pillar_totals()) == {"pillar_0", "pillar_1", "pillar_2"}
    np.testing.assert_allclose(profile.as_array(), ensemble.mean_allocation)


def test_profile_is_reproducible(demo_setup):
    a, _ = retrospective(demo_setup, runs=2, seed=4)
    b, _ = retrospective(demo_setup, runs=2, seed=4, jobs=2)
    assert a == b


def test_rank_stability():
    p = np.array([0.1, 0.4, 0.2, 0.3])
    assert rank_stability([p]) == 1.0
    assert rank_stability([p, p * 2]) == pytest.approx(1.0)
    assert rank_stability([p, p, -p]) == pytest.approx(-1.0)
