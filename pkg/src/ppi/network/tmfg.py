from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from ppi.errors import EstimationError


@dataclass(frozen=True)
class UndirectedFilteredGraph:
    """Undirected planar filtered graph; ``edges`` holds ``(i, j, w)`` with ``i < j``."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def edge_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.edges}

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g


def _check_weights(weights: np.ndarray) -> np.ndarray:
    W = np.asarray(weights, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise EstimationError(f"TMFG needs a square matrix, got shape {W.shape}")
    if W.shape[0] < 4:
        raise EstimationError(f"TMFG needs at least 4 nodes, got {W.shape[0]}")
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise EstimationError("TMFG weights must be finite and nonnegative")
    if not np.allclose(W, W.T, atol=1e-12):
        raise EstimationError("TMFG weights must be symmetric")
    W = W.copy()
    np.fill_diagonal(W, 0.0)
    return W


def seed_clique(W: np.ndarray) -> tuple[int, int, int, int]:
    """4-clique of maximal total weight; the lexicographically first one wins ties."""
    n = W.shape[0]
    best = -np.inf
    best_q: tuple[int, int, int, int] = (0, 1, 2, 3)
    for a in range(n - 3):
        for b in range(a + 1, n - 2):
            rest = np.arange(b + 1, n)
            s = W[a, rest] + W[b, rest]
            total = W[a, b] + s[:, None] + s[None, :] + W[np.ix_(rest, rest)]
            total[np.tril_indices(rest.size)] = -np.inf
            k = int(np.argmax(total))
            if total.flat[k] > best:
                best = float(total.flat[k])
                c, d = divmod(k, rest.size)
                best_q = (a, b, int(rest[c]), int(rest[d]))
    return best_q


def tmfg(weights: np.ndarray) -> UndirectedFilteredGraph:
    """Triangulated maximally filtered graph of a symmetric nonnegative weight matrix.

    Starts from the heaviest 4-clique and repeatedly inserts the (vertex, face)
    pair with the largest gain ``w(v,a) + w(v,b) + w(v,c)``. Ties go to the
    lowest vertex, then to the earliest face. The result is maximal planar with
    ``3n - 6`` edges.
    """
    W = _check_weights(weights)
    n = W.shape[0]
    a, b, c, d = seed_clique(W)
    edges: list[tuple[int, int]] = [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)]
    faces: list[tuple[int, int, int]] = [(a, b, c), (a, b, d), (a, c, d), (b, c, d)]
    remaining = [v for v in range(n) if v not in (a, b, c, d)]

    while remaining:
        F = np.asarray(faces)
        rem = np.asarray(remaining)
        gains = W[np.ix_(rem, F[:, 0])] + W[np.ix_(rem, F[:, 1])] + W[np.ix_(rem, F[:, 2])]
        k = int(np.argmax(gains))
        vi, fi = divmod(k, len(faces))
        v = remaining.pop(vi)
        x, y, z = faces[fi]
        edges.extend([(x, v), (y, v), (z, v)])
        faces[fi] = (x, y, v)
        faces.append((x, z, v))
        faces.append((y, z, v))

    out = tuple(sorted((min(i, j), max(i, j), float(W[i, j])) for i, j in edges))
    return UndirectedFilteredGraph(n=n, edges=out)


def check_filtered_graph(graph: UndirectedFilteredGraph) -> None:
    """Raise if the graph is not planar, connected and of size ``3n - 6``."""
    g = graph.to_networkx()
    if not nx.check_planarity(g)[0]:
        raise EstimationError("filtered graph is not planar")
    if not nx.is_connected(g):
        raise EstimationError("filtered graph is not connected")
    if graph.edge_count != 3 * graph.n - 6:
        raise EstimationError(f"filtered graph has {graph.edge_count} edges, expected {3 * graph.n - 6}")
