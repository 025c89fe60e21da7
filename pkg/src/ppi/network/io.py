from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from ppi.errors import SchemaError
from ppi.models.network import SpilloverNetwork

CORNER = "from\\to"


def adjacency_frame(network: SpilloverNetwork) -> pd.DataFrame:
    labels = list(network.labels) if network.labels else [str(i) for i in range(network.n)]
    df = pd.DataFrame(network.weights, index=labels, columns=labels)
    df.index.name = CORNER
    return df


def write_adjacency(network: SpilloverNetwork, path: Path) -> Path:
    """CSV with indicator ids as header row and column; cell (i, j) is the weight of i -> j."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    adjacency_frame(network).to_csv(path, float_format="%.9g", lineterminator="\n")
    return path


def read_adjacency(path: Path) -> SpilloverNetwork:
    path = Path(path)
    try:
        df = pd.read_csv(path, index_col=0, dtype={CORNER: str})
    except FileNotFoundError as e:
        raise SchemaError("adjacency file not found", path=str(path)) from e
    rows = [str(r) for r in df.index]
    cols = [str(c) for c in df.columns]
    if rows != cols:
        raise SchemaError("adjacency row and column labels differ", path=str(path))
    values = df.to_numpy(dtype=float)
    if np.isnan(values).any():
        bad = sorted({int(r) + 2 for r in np.argwhere(np.isnan(values))[:, 0]})
        raise SchemaError("empty adjacency cells", path=str(path), rows=bad)
    return SpilloverNetwork(values, tuple(rows))


def network_path(directory: Path, country: str) -> Path:
    return Path(directory) / f"{country}.csv"


def read_networks(directory: Path, countries: list[str]) -> dict[str, SpilloverNetwork]:
    """One ``<country>.csv`` adjacency file per country."""
    out: dict[str, SpilloverNetwork] = {}
    missing = [c for c in countries if not network_path(directory, c).exists()]
    if missing:
        raise SchemaError(f"no network file for {', '.join(missing)}", path=str(directory))
    for c in countries:
        out[c] = read_adjacency(network_path(directory, c))
    return out
