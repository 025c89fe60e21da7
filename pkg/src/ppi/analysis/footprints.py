from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from ppi.analysis.metrics import weighted_jaccard
from ppi.analysis.retrospective import allocation_profile
from ppi.errors import DomainError
from ppi.game.ensemble import run_monte_carlo
from ppi.models.country import CountrySetup
from ppi.models.panel import ClusterAssignment
from ppi.models.reports import AllocationProfile, FootprintEdge, ProfileMode

logger = logging.getLogger(__name__)


@dataclass
class FootprintReport:
    follower: str
    edges: list[FootprintEdge]
    profiles: dict[str, AllocationProfile]
    # None when no candidate produced a converged run
    most_feasible: str | None
    trivial_target: str | None


def candidates_above(assignment: ClusterAssignment, follower: str) -> list[str]:
    """Countries in the cluster immediately above the follower's (cluster 1 is the most developed)."""
    label = assignment.label_of(follower)
    if label == 1:
        return []
    return assignment.members(label - 1)


def footprints(
    follower: CountrySetup,
    retrospective_profile: AllocationProfile,
    candidates: dict[str, np.ndarray],
    runs: int = 1000,
    *,
    seed: int = 0,
    jobs: int = 1,
    **simulation: Any,
) -> FootprintReport:
    """Prospective runs of ``follower`` towards each candidate's final indicators.

    The follower starts from its last observation and keeps its own network and
    budget. Feasibility is the weighted Jaccard between the retrospective
    profile and the footprint profile; the trivial target is the candidate whose
    indicators are most similar to the follower's.
    """
    if not candidates:
        raise DomainError(f"{follower.name}: no candidate targets")
    start = follower.targets
    base = np.asarray(retrospective_profile.mean, dtype=float)
    edges: list[FootprintEdge] = []
    profiles: dict[str, AllocationProfile] = {}
    for target, final in candidates.items():
        setup = replace(follower, initial=np.asarray(start, dtype=float), targets=np.asarray(final, dtype=float))
        ensemble = run_monte_carlo(
            setup.config(seed=seed, **simulation), setup.network, runs=runs, jobs=jobs, mode="footprint"
        )
        if not ensemble.any_converged:
            logger.warning(f"Footprints {follower.name}: no run towards {target} converged, candidate dropped")
            continue
        profile = allocation_profile(setup, ensemble, ProfileMode.FOOTPRINT, target_country=target)
        profiles[target] = profile
        edges.append(
            FootprintEdge(
                follower=follower.name,
                target=target,
                feasibility=min(1.0, weighted_jaccard(base, profile.as_array())),
                target_similarity=min(1.0, weighted_jaccard(start, final)),
                top_pillar=profile.top_pillar(),
            )
        )
    # first candidate wins ties
    most_feasible = max(edges, key=lambda e: e.feasibility).target if edges else None
    trivial = max(edges, key=lambda e: e.target_similarity).target if edges else None
    logger.info(f"Footprints {follower.name}: most feasible {most_feasible}, trivial {trivial}")
    return FootprintReport(
        follower=follower.name,
        edges=edges,
        profiles=profiles,
        most_feasible=most_feasible,
        trivial_target=trivial,
    )
