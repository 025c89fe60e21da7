"""Behavioural rules of the allocation game.

Every rule accepts scalars or equally shaped numpy arrays and is applied
elementwise, so the simulation loop can update all issues in one call.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from ppi.errors import ContractViolation, DomainError


def institutional_prob(indicator_level: ArrayLike) -> np.ndarray | float:
    """Probability ``I / e^(1 - I)`` derived from a rule-of-law style indicator."""
    x = np.asarray(indicator_level, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise DomainError(f"institutional indicator must lie in [0, 1], got {indicator_level!r}")
    out = x / np.exp(1.0 - x)
    return float(out) if out.ndim == 0 else out


def update_indicator(
    I_prev: ArrayLike,
    T: ArrayLike,
    gamma: float,
    own_contribution: ArrayLike,
    spillin: ArrayLike,
) -> np.ndarray | float:
    I = np.asarray(I_prev, dtype=float)
    out = I + gamma * (np.asarray(T, dtype=float) - I) * (
        np.asarray(own_contribution, dtype=float) + np.asarray(spillin, dtype=float)
    )
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def servant_benefit(
    I: ArrayLike, P: ArrayLike, C: ArrayLike, theta: ArrayLike, f_R: float
) -> np.ndarray | float:
    P_arr = np.asarray(P, dtype=float)
    C_arr = np.asarray(C, dtype=float)
    if np.any(C_arr > P_arr):
        raise ContractViolation("contribution exceeds allocation")
    out = (np.asarray(I, dtype=float) + P_arr - C_arr) * (1.0 - np.asarray(theta) * f_R)
    return float(out) if out.ndim == 0 else out


def detection_probabilities(P: np.ndarray, C: np.ndarray, f_C: float) -> np.ndarray:
    diverted = np.asarray(P, dtype=float) - np.asarray(C, dtype=float)
    total = diverted.sum()
    if total <= 0:
        return np.zeros_like(diverted)
    return f_C * diverted / total


def draw_detections(P: np.ndarray, C: np.ndarray, f_C: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli draw per issue; always consumes ``n`` uniforms from ``rng``."""
    probs = detection_probabilities(P, C, f_C)
    return (rng.random(probs.shape) < probs).astype(np.int8)


def update_contribution(
    C_prev1: ArrayLike,
    C_prev2: ArrayLike,
    F_prev1: ArrayLike,
    F_prev2: ArrayLike,
    P: ArrayLike,
) -> np.ndarray | float:
    C1 = np.asarray(C_prev1, dtype=float)
    C2 = np.asarray(C_prev2, dtype=float)
    dF = np.asarray(F_prev1, dtype=float) - np.asarray(F_prev2, dtype=float)
    # np.sign(0) == 0: no move without a signal
    d = np.sign(dF * (C1 - C2))
    out = np.minimum(P, np.maximum(0.0, C1 + d * np.abs(dF) * (C1 + C2) / 2.0))
    return float(out) if out.ndim == 0 else out


def allocate(
    T: np.ndarray,
    I: np.ndarray,
    out_degrees: np.ndarray,
    theta: np.ndarray,
    f_R: float,
    B: float,
) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    q = np.maximum(0.0, T - np.asarray(I, dtype=float)) * (np.asarray(out_degrees) + 1) * (
        1.0 - np.asarray(theta) * f_R
    )
    total = q.sum()
    if total <= 0:
        return np.full(T.shape, B / T.size)
    return q / total * B


def random_allocation(n: int, B: float, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    total = u.sum()
    if total <= 0:
        return np.full(n, B / n)
    return u / total * B
