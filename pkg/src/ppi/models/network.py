from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ppi.errors import DomainError


@dataclass(frozen=True, eq=False)
class SpilloverNetwork:
    """Directed weighted spillover graph; ``weights[i, j] > 0`` means i spills over to j."""

    weights: np.ndarray
    labels: tuple[str, ...] | None = None
    _out_degrees: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DomainError(f"spillover weights must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise DomainError("spillover weights must be finite")
        if np.any(w < 0):
            raise DomainError("spillover weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise DomainError("spillover network must have a zero diagonal")
        if self.labels is not None and len(self.labels) != w.shape[0]:
            raise DomainError(f"{len(self.labels)} labels for {w.shape[0]} nodes")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        k = (w > 0).sum(axis=1)
        k.setflags(write=False)
        object.__setattr__(self, "_out_degrees", k)

    @classmethod
    def empty(cls, n: int, labels: tuple[str, ...] | None = None) -> SpilloverNetwork:
        return cls(np.zeros((n, n)), labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def out_degrees(self) -> np.ndarray:
        return self._out_degrees

    @property
    def edge_count(self) -> int:
        return int((self.weights > 0).sum())

    def in_strength(self, gamma: float = 1.0) -> np.ndarray:
        """Incoming spillover strength ``gamma * sum_j A[j, i]`` per node."""
        return gamma * self.weights.sum(axis=0)

    def mean_positive_weight(self) -> float:
        positive = self.weights[self.weights > 0]
        return float(positive.mean()) if positive.size else 0.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpilloverNetwork):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.weights, other.weights)

    __hash__ = None  # type: ignore[assignment]
