from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import cut_tree, linkage

from ppi.errors import DomainError
from ppi.models.panel import ClusterAssignment, IndicatorPanel


def ward_labels(features: np.ndarray, k: int) -> np.ndarray:
    """Ward (L2) agglomerative labels ``1..k``, ordered by descending mean feature level."""
    X = np.asarray(features, dtype=float)
    n = X.shape[0]
    if k < 1:
        raise DomainError("cluster count must be >= 1")
    if k > n:
        raise DomainError(f"cannot form {k} clusters from {n} countries")
    if n == 1:
        return np.ones(1, dtype=int)
    raw = cut_tree(linkage(X, method="ward", metric="euclidean"), n_clusters=k).ravel()
    level = X.mean(axis=1)
    means = np.array([level[raw == c].mean() for c in range(k)])
    # stable: equal means keep the cut order
    order = np.argsort(-means, kind="stable")
    relabel = np.empty(k, dtype=int)
    relabel[order] = np.arange(1, k + 1)
    return relabel[raw]


def ward_cluster(panel: IndicatorPanel, k: int = 4) -> ClusterAssignment:
    """Cluster countries on their time-averaged indicator vectors."""
    labels = ward_labels(panel.time_average(), k)
    return ClusterAssignment(labels=dict(zip(panel.countries, (int(x) for x in labels))), k=k)


def within_sum_of_squares(features: np.ndarray, labels: np.ndarray) -> float:
    X = np.asarray(features, dtype=float)
    total = 0.0
    for lab in np.unique(labels):
        block = X[labels == lab]
        total += float(((block - block.mean(axis=0)) ** 2).sum())
    return total
