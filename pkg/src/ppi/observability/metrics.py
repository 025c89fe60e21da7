from __future__ import annotations

from pathlib import Path

from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

SIMULATION_RUNS = Counter("ppi_simulation_runs_total", "Simulation runs completed", ["mode"])
NONCONVERGED_RUNS = Counter("ppi_nonconverged_runs_total", "Runs that hit max_steps", ["mode"])
SIMULATION_STEPS = Histogram(
    "ppi_simulation_steps",
    "Ticks until the halting rule fired",
    buckets=(5, 10, 25, 50, 100, 250, 500, 1000, 2500, 5000, 10000),
)
NETWORKS_ESTIMATED = Counter("ppi_networks_estimated_total", "Country networks estimated")
NEGATIVE_EDGES_DROPPED = Counter("ppi_negative_edges_dropped_total", "TMFG edges dropped for negative correlation")


def write_metrics(path: Path) -> None:
    """Dump the default registry in Prometheus text format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
