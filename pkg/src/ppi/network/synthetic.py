from __future__ import annotations

import networkx as nx
import numpy as np

from ppi.models.network import SpilloverNetwork


def _from_digraph(g: nx.DiGraph, n: int, rng: np.random.Generator, low: float, high: float) -> SpilloverNetwork:
    weights = np.zeros((n, n))
    for i, j in sorted(g.edges()):
        if i != j:
            weights[i, j] = rng.uniform(low, high)
    return SpilloverNetwork(weights)


def erdos_renyi_network(
    n: int = 50, edges: int = 100, seed: int = 0, low: float = 0.0, high: float = 1.0
) -> SpilloverNetwork:
    """Directed G(n, m) graph with uniform weights."""
    rng = np.random.default_rng(seed)
    g = nx.gnm_random_graph(n, edges, seed=seed, directed=True)
    return _from_digraph(g, n, rng, low, high)


def hub_heavy_network(n: int = 50, seed: int = 0, low: float = 0.1, high: float = 1.0) -> SpilloverNetwork:
    """Scale-free directed graph (parallel edges collapsed, self-loops removed)."""
    rng = np.random.default_rng(seed)
    g = nx.DiGraph(nx.scale_free_graph(n, seed=seed))
    return _from_digraph(g, n, rng, low, high)


def cause_effect_pair(
    samples: int, rng: np.random.Generator, coef: float = 0.8
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform cause ``x`` and effect ``y = coef * x + uniform noise``."""
    x = rng.uniform(-1.0, 1.0, samples)
    y = coef * x + rng.uniform(-1.0, 1.0, samples)
    return x, y


def demo_targets(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets ``T ~ U(0, 1)`` and initial levels ``I0 ~ U(0, T)``."""
    rng = np.random.default_rng(seed)
    T = rng.random(n)
    return T, rng.uniform(0.0, T)
