from __future__ import annotations

import logging

import numpy as np

from ppi.errors import DomainError
from ppi.game.rules import (
    allocate,
    draw_detections,
    institutional_prob,
    random_allocation,
    servant_benefit,
    update_contribution,
    update_indicator,
)
from ppi.models.network import SpilloverNetwork
from ppi.models.simulation import (
    AgentState,
    GovernmentMode,
    ServantMode,
    SimulationConfig,
    SimulationTrace,
    SpilloverMode,
    SupervisionMode,
)

logger = logging.getLogger(__name__)


def spillover_weights(config: SimulationConfig, network: SpilloverNetwork) -> np.ndarray:
    """Matrix ``W`` such that spill-in is ``C @ W`` under the configured spillover mode."""
    if network.n != config.n:
        raise DomainError(f"network has {network.n} nodes, config has {config.n} indicators")
    toggles = config.toggles
    if toggles.spillovers is SpilloverMode.NETWORK:
        return network.weights
    w = toggles.identity_weight
    if w is None:
        w = network.mean_positive_weight()
    return w * np.eye(config.n)


def institutional_probs(config: SimulationConfig, indicators: np.ndarray) -> tuple[float, float]:
    """(f_R, f_C) at the given indicator levels."""
    toggles = config.toggles
    if toggles.supervision is SupervisionMode.FIXED:
        f = float(toggles.fixed_supervision)  # type: ignore[arg-type]
        return f, f
    return (
        float(institutional_prob(indicators[config.rule_of_law_idx])),
        float(institutional_prob(indicators[config.control_of_corruption_idx])),
    )


def initial_state(config: SimulationConfig, rng: np.random.Generator) -> AgentState:
    n = config.n
    P0 = np.full(n, config.budget / n)
    if config.toggles.servants is ServantMode.FORCED:
        C0 = C_m1 = config.toggles.forced_fraction * P0  # type: ignore[operator]
    else:
        C0 = rng.uniform(0.0, P0)
        C_m1 = rng.uniform(0.0, P0)
    F0 = rng.random(n)
    F_m1 = rng.random(n)
    return AgentState(
        t=0,
        indicators=np.array(config.initial_indicators, dtype=float),
        allocations=P0,
        contributions_prev1=np.asarray(C0, dtype=float),
        contributions_prev2=np.asarray(C_m1, dtype=float),
        benefits_prev1=F0,
        benefits_prev2=F_m1,
        detections=np.zeros(n, dtype=np.int8),
    )


def step(
    state: AgentState,
    config: SimulationConfig,
    network: SpilloverNetwork,
    rng: np.random.Generator,
    *,
    weights: np.ndarray | None = None,
) -> AgentState:
    """Advance the game by one tick.

    Order: contributions, detections, benefits, indicators, next allocation.
    Benefits see this tick's detections, so a servant caught diverting loses
    the benefit in the same tick. Institutional probabilities use the
    start-of-tick indicator levels.
    """
    toggles = config.toggles
    W = spillover_weights(config, network) if weights is None else weights
    P = state.allocations
    I_prev = state.indicators
    f_R, f_C = institutional_probs(config, I_prev)

    if toggles.servants is ServantMode.LEARNING:
        C = update_contribution(
            state.contributions_prev1,
            state.contributions_prev2,
            state.benefits_prev1,
            state.benefits_prev2,
            P,
        )
    elif toggles.servants is ServantMode.RANDOM:
        C = rng.uniform(0.0, P)
    else:
        C = toggles.forced_fraction * P  # type: ignore[operator]
    C = np.asarray(C, dtype=float)

    theta = draw_detections(P, C, f_C, rng)
    F = servant_benefit(I_prev, P, C, theta, f_R)
    I = update_indicator(I_prev, config.targets, config.gamma, C, C @ W)

    if toggles.government is GovernmentMode.ADAPTIVE:
        P_next = allocate(config.targets, I, network.out_degrees, theta, f_R, config.budget)
    else:
        P_next = random_allocation(config.n, config.budget, rng)

    return AgentState(
        t=state.t + 1,
        indicators=np.asarray(I),
        allocations=P_next,
        contributions_prev1=C,
        contributions_prev2=state.contributions_prev1,
        benefits_prev1=np.asarray(F),
        benefits_prev2=state.benefits_prev1,
        detections=theta,
    )


def first_hits(indicators: np.ndarray, targets: np.ndarray, tol: float) -> np.ndarray:
    """First row with ``|T - I| < tol`` per column, ``-1`` where never reached."""
    hit = np.abs(targets[None, :] - indicators) < tol
    first = hit.argmax(axis=0)
    return np.where(hit.any(axis=0), first, -1)


def run_simulation(
    config: SimulationConfig,
    network: SpilloverNetwork,
    rng: np.random.Generator | None = None,
) -> SimulationTrace:
    """Run the game until every indicator moves less than ``epsilon`` in one tick.

    A run that does not halt within ``max_steps`` ticks is returned with
    ``converged=False``; the caller decides what to do with it.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    W = spillover_weights(config, network)
    state = initial_state(config, rng)

    I_rows = [state.indicators]
    P_rows = [state.allocations]
    C_rows = [state.contributions_prev1]
    theta_rows = [state.detections]

    converged = False
    for _ in range(config.max_steps):
        spent = state.allocations
        nxt = step(state, config, network, rng, weights=W)
        I_rows.append(nxt.indicators)
        P_rows.append(spent)
        C_rows.append(nxt.contributions_prev1)
        theta_rows.append(nxt.detections)
        moved = np.max(np.abs(nxt.indicators - state.indicators))
        state = nxt
        if moved < config.epsilon:
            converged = True
            break

    if not converged:
        logger.warning(f"Run with seed {config.seed} did not halt within {config.max_steps} steps")

    indicators = np.vstack(I_rows)
    open_gaps = int(np.sum(np.abs(config.targets - indicators[-1]) >= config.target_tol))
    if converged and open_gaps:
        logger.debug(f"Run with seed {config.seed} halted at step {state.t} with {open_gaps} indicators off target")
    return SimulationTrace(
        steps=state.t,
        indicators=indicators,
        allocations=np.vstack(P_rows),
        contributions=np.vstack(C_rows),
        detections=np.vstack(theta_rows),
        ell_i=first_hits(indicators, config.targets, config.target_tol),
        converged=converged,
        targets=np.array(config.targets),
        budget=config.budget,
        seed=config.seed,
        target_tol=config.target_tol,
    )
