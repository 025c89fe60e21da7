from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from ppi.models import CountrySetup, SimulationConfig, SpilloverNetwork
from ppi.network.synthetic import demo_targets, erdos_renyi_network
from ppi.pipeline.io import save_panel
from ppi.pipeline.synthetic import synthetic_panel


@pytest.fixture
def chain_network() -> SpilloverNetwork:
    # 0 -> 1 -> 2 -> 3, plus 0 -> 3
    w = np.zeros((4, 4))
    w[0, 1] = 0.5
    w[1, 2] = 0.4
    w[2, 3] = 0.3
    w[0, 3] = 0.2
    return SpilloverNetwork(w, ("a", "b", "c", "d"))


@pytest.fixture
def small_config() -> SimulationConfig:
    return SimulationConfig(
        targets=[0.8, 0.7, 0.9, 0.6],
        initial_indicators=[0.3, 0.2, 0.5, 0.4],
        rule_of_law_idx=0,
        control_of_corruption_idx=1,
        max_steps=5_000,
        seed=3,
    )


@pytest.fixture
def demo_setup() -> CountrySetup:
    net = erdos_renyi_network(12, 24, seed=5)
    T, I0 = demo_targets(12, 5)
    return CountrySetup(
        name="demo",
        network=net,
        initial=I0,
        targets=T,
        rule_of_law_idx=0,
        control_of_corruption_idx=1,
        indicators=tuple(f"i{k:02d}" for k in range(12)),
        pillars={f"i{k:02d}": f"pillar_{k % 3}" for k in range(12)},
    )


@pytest.fixture
def synthetic():
    return synthetic_panel(countries=8, years=11, pillars=3, per_pillar=3, seed=1)


@pytest.fixture
def panel_files(tmp_path: Path, synthetic) -> dict[str, Path]:
    """Normalized-looking synthetic panel on disk plus a matching GDP file."""
    panel = synthetic.panel
    paths = save_panel(panel, tmp_path / "panel.csv", tmp_path / "pillars.csv")
    gdp = tmp_path / "gdp.csv"
    rows = ["country,year,value"]
    for ci, c in enumerate(panel.countries):
        for yi, y in enumerate(panel.years):
            rows.append(f"{c},{y},{float(synthetic.gdp_per_capita[ci, yi])!r}")
    gdp.write_text("\n".join(rows) + "\n")
    return {"panel": paths[0], "pillars": paths[1], "gdp": gdp}


@pytest.fixture
def run_config(tmp_path: Path) -> Path:
    p = tmp_path / "run.toml"
    p.write_text(
        "\n".join(
            [
                "[simulation]",
                "max_steps = 3000",
                "[indicators]",
                'rule_of_law = "p01_i1"',
                'control_of_corruption = "p02_i1"',
                'corruption = "corruption"',
                "[calibration]",
                "gamma_points = 3",
                "runs = 3",
                "subset_samples = 20",
                "[analysis]",
                "clusters = 4",
                "top_k = 3",
            ]
        )
        + "\n"
    )
    return p
