from __future__ import annotations

import time

import numpy as np
import pytest

from ppi.errors import MissingDataError, SchemaError
from ppi.pipeline.io import load_country_values, load_gdp, load_panel, save_panel
from ppi.pipeline.synthetic import synthetic_panel


def test_roundtrip(tmp_path, synthetic):
    panel = synthetic.panel
    save_panel(panel, tmp_path / "p.csv", tmp_path / "pillars.csv")
    loaded = load_panel(tmp_path / "p.csv", tmp_path / "pillars.csv")
    assert loaded == panel


def test_missing_cell_reported(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("country,year,indicator,value\nA,2000,x,0.1\nA,2001,x,0.2\nB,2000,x,0.3\n")
    with pytest.raises(MissingDataError) as err:
        load_panel(p)
    assert err.value.cells == [("B", 2001, "x")]


def test_imputer_fills_holes(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("country,year,indicator,value\nA,2000,x,0.1\nA,2001,x,0.2\nB,2000,x,0.3\nB,2001,x,\n")

    def forward_fill(cube, countries, years, indicators):
        out = cube.copy()
        out[1, 1, 0] = out[1, 0, 0]
        return out

    panel = load_panel(p, imputer=forward_fill)
    assert panel.values[1, 1, 0] == 0.3


def test_missing_column_named(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("country,year,value\nA,2000,0.1\n")
    with pytest.raises(SchemaError, match="indicator"):
        load_panel(p)


def test_non_numeric_row_reported(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("country,year,indicator,value\nA,2000,x,0.1\nA,2001,x,abc\n")
    with pytest.raises(SchemaError) as err:
        load_panel(p)
    assert err.value.rows == [3]


def test_duplicate_rows_rejected(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("country,year,indicator,value\nA,2000,x,0.1\nA,2000,x,0.2\n")
    with pytest.raises(SchemaError, match="duplicate"):
        load_panel(p)


def test_gdp_aligned_with_panel(panel_files, synthetic):
    panel = load_panel(panel_files["panel"])
    gdp = load_gdp(panel_files["gdp"], panel)
    np.testing.assert_allclose(gdp, synthetic.gdp_per_capita)


def test_country_values(tmp_path):
    p = tmp_path / "budgets.csv"
    p.write_text("country,budget\nA,1.5\nB,2\n")
    assert load_country_values(p, "budget") == {"A": 1.5, "B": 2.0}


@pytest.mark.slow
def test_full_size_panel_loads_quickly(tmp_path):
    big = synthetic_panel(countries=117, years=11, pillars=13, per_pillar=6, seed=0).panel
    save_panel(big, tmp_path / "big.csv")
    start = time.perf_counter()
    loaded = load_panel(tmp_path / "big.csv")
    assert time.perf_counter() - start < 1.0
    assert loaded.shape == (117, 11, 79)
