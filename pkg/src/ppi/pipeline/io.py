"""Long-format CSV I/O for indicator panels.

Panel files carry ``country,year,indicator,value`` rows; pillar maps carry
``indicator,pillar``; GDP per capita files carry ``country,year,value``;
flag files carry ``indicator,n2,switch``.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd

from ppi.errors import MissingDataError, SchemaError
from ppi.models.panel import IndicatorFlags, IndicatorPanel
from ppi.validation.schema import reject_duplicates, require_columns, require_numeric

logger = logging.getLogger(__name__)

PANEL_COLUMNS = ["country", "year", "indicator", "value"]
PILLAR_COLUMNS = ["indicator", "pillar"]
GDP_COLUMNS = ["country", "year", "value"]
FLAG_COLUMNS = ["indicator", "n2", "switch"]

# Receives the values cube with NaN holes plus (countries, years, indicators); returns a filled cube.
Imputer = Callable[[np.ndarray, list[str], list[int], list[str]], np.ndarray]


def _read(path: Path, string_columns: list[str]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise SchemaError("input file not found", path=str(path))
    return pd.read_csv(path, engine="pyarrow", dtype={c: str for c in string_columns})


def _years(df: pd.DataFrame, path: Path) -> pd.Series:
    years = require_numeric(df, "year", path=str(path))
    bad = years.isna() | (years != years.round())
    if bad.any():
        raise SchemaError("year must be an integer", path=str(path), rows=[int(i) + 2 for i in df.index[bad]], columns=["year"])
    return years.astype(int)


def _missing_cells(cube: np.ndarray, countries: list[str], years: list[int], indicators: list[str]) -> list[tuple[str, int, str]]:
    return [(countries[c], years[y], indicators[i]) for c, y, i in np.argwhere(np.isnan(cube))]


def load_panel(
    path: Path,
    pillars_path: Path | None = None,
    flags_path: Path | None = None,
    imputer: Imputer | None = None,
) -> IndicatorPanel:
    """Read a long-format panel; countries and indicators keep first-appearance order.

    Missing cells (empty values or absent rows) are rejected unless an
    ``imputer`` fills them.
    """
    path = Path(path)
    df = _read(path, ["country", "indicator"])
    require_columns(df, PANEL_COLUMNS, path=str(path))
    df = df[PANEL_COLUMNS].copy()
    df["year"] = _years(df, path)
    df["value"] = require_numeric(df, "value", path=str(path))
    reject_duplicates(df, ["country", "year", "indicator"], path=str(path))

    countries = list(pd.unique(df["country"]))
    indicators = list(pd.unique(df["indicator"]))
    years = sorted(int(y) for y in pd.unique(df["year"]))

    c_idx = pd.Categorical(df["country"], categories=countries).codes
    y_idx = pd.Categorical(df["year"], categories=years).codes
    i_idx = pd.Categorical(df["indicator"], categories=indicators).codes
    cube = np.full((len(countries), len(years), len(indicators)), np.nan)
    cube[c_idx, y_idx, i_idx] = df["value"].to_numpy(dtype=float)

    if np.isnan(cube).any():
        if imputer is None:
            raise MissingDataError(_missing_cells(cube, countries, years, indicators), path=str(path))
        logger.info(f"Imputing {int(np.isnan(cube).sum())} missing cells with {getattr(imputer, '__name__', imputer)}")
        cube = np.asarray(imputer(cube, countries, years, indicators), dtype=float)
        if np.isnan(cube).any():
            raise MissingDataError(_missing_cells(cube, countries, years, indicators), path=str(path))

    pillars = load_pillars(pillars_path) if pillars_path is not None else {}
    flags = load_flags(flags_path) if flags_path is not None else {}
    logger.info(f"Loaded panel {path.name}: {len(countries)} countries, {len(years)} years, {len(indicators)} indicators")
    return IndicatorPanel(countries, years, indicators, cube, pillars=pillars, flags=flags)


def save_panel(
    panel: IndicatorPanel,
    path: Path,
    pillars_path: Path | None = None,
    flags_path: Path | None = None,
) -> list[Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nc, ny, ni = panel.shape
    df = pd.DataFrame(
        {
            "country": np.repeat(panel.countries, ny * ni),
            "year": np.tile(np.repeat(panel.years, ni), nc),
            "indicator": np.tile(panel.indicators, nc * ny),
            "value": panel.values.reshape(-1),
        }
    )
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    written = [path]
    if pillars_path is not None:
        written.append(save_pillars(panel.pillars, pillars_path))
    if flags_path is not None:
        written.append(save_flags(panel.flags, panel.indicators, flags_path))
    return written


def load_pillars(path: Path) -> dict[str, str]:
    path = Path(path)
    df = _read(path, PILLAR_COLUMNS)
    require_columns(df, PILLAR_COLUMNS, path=str(path))
    reject_duplicates(df, ["indicator"], path=str(path))
    return dict(zip(df["indicator"], df["pillar"]))


def save_pillars(pillars: dict[str, str], path: Path) -> Path:
    path = Path(path)
    pd.DataFrame({"indicator": list(pillars), "pillar": list(pillars.values())}).to_csv(
        path, index=False, lineterminator="\n"
    )
    return path


def load_flags(path: Path) -> dict[str, IndicatorFlags]:
    path = Path(path)
    df = _read(path, ["indicator"])
    require_columns(df, FLAG_COLUMNS, path=str(path))
    return {
        ind: IndicatorFlags(skew_corrected=bool(int(n2)), inverted=bool(int(sw)))
        for ind, n2, sw in zip(df["indicator"], df["n2"], df["switch"])
    }


def save_flags(flags: dict[str, IndicatorFlags], indicators: list[str], path: Path) -> Path:
    path = Path(path)
    rows = [flags.get(i, IndicatorFlags()) for i in indicators]
    pd.DataFrame(
        {
            "indicator": indicators,
            "n2": [int(f.skew_corrected) for f in rows],
            "switch": [int(f.inverted) for f in rows],
        }
    ).to_csv(path, index=False, lineterminator="\n")
    return path


def load_gdp(path: Path, panel: IndicatorPanel) -> np.ndarray:
    """Countries × years GDP per capita matrix aligned with ``panel``."""
    path = Path(path)
    df = _read(path, ["country"])
    require_columns(df, GDP_COLUMNS, path=str(path))
    df = df[GDP_COLUMNS].copy()
    df["year"] = _years(df, path)
    df["value"] = require_numeric(df, "value", path=str(path))
    reject_duplicates(df, ["country", "year"], path=str(path))
    lookup = {(c, int(y)): float(v) for c, y, v in zip(df["country"], df["year"], df["value"])}
    out = np.full((len(panel.countries), len(panel.years)), np.nan)
    missing: list[tuple[str, int, str]] = []
    for ci, c in enumerate(panel.countries):
        for yi, y in enumerate(panel.years):
            v = lookup.get((c, y), np.nan)
            if np.isnan(v):
                missing.append((c, y, "gdp_per_capita"))
            out[ci, yi] = v
    if missing:
        raise MissingDataError(missing, path=str(path))
    return out


def load_country_values(path: Path, column: str) -> dict[str, float]:
    """Per-country scalars (``country,<column>``), e.g. budgets or calibrated γ values."""
    path = Path(path)
    df = _read(path, ["country"])
    require_columns(df, ["country", column], path=str(path))
    reject_duplicates(df, ["country"], path=str(path))
    values = require_numeric(df, column, path=str(path))
    if values.isna().any():
        raise SchemaError(f"empty {column} values", path=str(path), rows=[int(i) + 2 for i in df.index[values.isna()]], columns=[column])
    return dict(zip(df["country"], values.astype(float)))


def load_clusters(path: Path) -> dict[str, int]:
    path = Path(path)
    df = _read(path, ["country"])
    require_columns(df, ["country", "cluster"], path=str(path))
    reject_duplicates(df, ["country"], path=str(path))
    labels = require_numeric(df, "cluster", path=str(path))
    return {c: int(v) for c, v in zip(df["country"], labels)}
