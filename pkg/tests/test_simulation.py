from __future__ import annotations

import time

import numpy as np
import pytest

from ppi.errors import DomainError
from ppi.game.simulation import first_hits, initial_state, run_simulation, spillover_weights, step
from ppi.models import MechanismToggles, SimulationConfig, SpilloverNetwork
from ppi.network.synthetic import demo_targets, erdos_renyi_network

TOGGLES = [
    MechanismToggles.full_model(),
    MechanismToggles(government="random", servants="random", spillovers="identity", identity_weight=0.3),
    MechanismToggles.fixed_supervision_at(0.5),
    MechanismToggles.forced_servants(0.4),
]


@pytest.mark.parametrize("toggles", TOGGLES, ids=lambda t: t.label())
def test_steps_conserve_budget_and_contracts(small_config, chain_network, toggles):
    config = small_config.model_copy(update={"toggles": toggles, "budget": 0.7})
    rng = np.random.default_rng(42)
    state = initial_state(config, rng)
    for _ in range(250):
        nxt = step(state, config, chain_network, rng)
        C = nxt.contributions_prev1
        assert state.allocations.sum() == pytest.approx(0.7, abs=1e-9)
        assert np.all(C >= 0)
        assert np.all(C <= state.allocations)
        assert np.all((nxt.indicators >= 0) & (nxt.indicators <= 1))
        state = nxt


def test_one_step_by_hand():
    config = SimulationConfig(
        targets=[1.0, 1.0],
        initial_indicators=[0.5, 0.5],
        rule_of_law_idx=0,
        control_of_corruption_idx=1,
        toggles=MechanismToggles.forced_servants(1.0),
    )
    net = SpilloverNetwork.empty(2)
    rng = np.random.default_rng(0)
    nxt = step(initial_state(config, rng), config, net, rng)
    np.testing.assert_allclose(nxt.contributions_prev1, [0.5, 0.5])
    np.testing.assert_allclose(nxt.indicators, [0.75, 0.75])
    np.testing.assert_array_equal(nxt.detections, [0, 0])
    np.testing.assert_allclose(nxt.allocations, [0.5, 0.5])


def test_already_at_target_halts_immediately(chain_network):
    I0 = [0.3, 0.4, 0.5, 0.6]
    config = SimulationConfig(targets=I0, initial_indicators=I0, rule_of_law_idx=0, control_of_corruption_idx=1)
    trace = run_simulation(config, chain_network)
    assert trace.converged
    assert trace.steps <= 2
    np.testing.assert_array_equal(trace.ell_i, [0, 0, 0, 0])


def test_same_seed_same_trace(small_config, chain_network):
    a = run_simulation(small_config, chain_network)
    b = run_simulation(small_config, chain_network)
    assert a.steps == b.steps
    np.testing.assert_array_equal(a.indicators, b.indicators)
    np.testing.assert_array_equal(a.allocations, b.allocations)
    np.testing.assert_array_equal(a.contributions, b.contributions)


def test_zero_network_equals_zero_identity_weight(small_config):
    net = SpilloverNetwork.empty(4)
    a = run_simulation(small_config, net)
    b = run_simulation(small_config.model_copy(update={"toggles": MechanismToggles.no_network(0.0)}), net)
    np.testing.assert_array_equal(a.indicators, b.indicators)
    np.testing.assert_array_equal(a.allocations, b.allocations)


def test_identity_weight_defaults_to_mean_positive_weight(small_config, chain_network):
    config = small_config.model_copy(update={"toggles": MechanismToggles.no_network()})
    W = spillover_weights(config, chain_network)
    np.testing.assert_allclose(W, np.eye(4) * np.mean([0.5, 0.4, 0.3, 0.2]))


def test_network_size_mismatch(small_config):
    with pytest.raises(DomainError):
        run_simulation(small_config, SpilloverNetwork.empty(3))


def test_first_hits():
    I = np.array([[0.1, 0.5], [0.45, 0.6], [0.5, 0.7]])
    np.testing.assert_array_equal(first_hits(I, np.array([0.5, 0.9]), 0.06), [1, -1])


def _demo_config(**kwargs) -> SimulationConfig:
    T, I0 = demo_targets(50, 0)
    return SimulationConfig(targets=T, initial_indicators=I0, rule_of_law_idx=0, control_of_corruption_idx=1, **kwargs)


def test_erdos_renyi_demo_run():
    net = erdos_renyi_network(50, 100, seed=0)
    config = _demo_config(seed=1)
    start = time.perf_counter()
    trace = run_simulation(config, net)
    assert time.perf_counter() - start < 5.0
    assert trace.converged
    I = trace.indicators
    T = config.targets
    # approach is monotone and never overshoots
    assert np.all(np.diff(I, axis=0) >= -1e-12)
    assert np.all(I <= T[None, :] + 1e-12)
    assert np.all(np.abs(I[-1] - I[-2]) < config.epsilon)
    assert np.abs(T - I[-1]).mean() < np.abs(T - I[0]).mean()
    # halting is about movement; attainment is reported separately
    assert trace.targets_met == bool(np.all(np.abs(T - I[-1]) < config.target_tol))
    np.testing.assert_allclose(trace.allocations.sum(axis=1), 1.0, atol=1e-9)


def test_erdos_renyi_demo_reaches_targets_with_honest_servants():
    net = erdos_renyi_network(50, 100, seed=0)
    config = _demo_config(seed=1, epsilon=1e-5, toggles=MechanismToggles.forced_servants(1.0))
    trace = run_simulation(config, net)
    assert trace.converged
    assert trace.targets_met
    assert np.all(np.abs(config.targets - trace.indicators[-1]) < config.target_tol)
    assert np.all(trace.ell_i >= 0)
    assert not trace.detections.any()


def test_caught_servant_loses_benefit_in_same_tick():
    config = SimulationConfig(
        targets=[1.0, 1.0],
        initial_indicators=[0.5, 0.5],
        rule_of_law_idx=0,
        control_of_corruption_idx=1,
        toggles=MechanismToggles(servants="random", supervision="fixed", fixed_supervision=1.0),
    )
    net = SpilloverNetwork.empty(2)
    rng = np.random.default_rng(4)
    state = initial_state(config, rng)
    for _ in range(50):
        nxt = step(state, config, net, rng)
        P, C = state.allocations, nxt.contributions_prev1
        expected = (state.indicators + P - C) * (1.0 - nxt.detections * 1.0)
        np.testing.assert_allclose(nxt.benefits_prev1, expected)
        state = nxt
