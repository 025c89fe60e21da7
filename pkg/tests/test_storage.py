from __future__ import annotations

import math

import orjson
import pandas as pd
import pytest

from ppi.errors import SchemaError
from ppi.models.reports import RunManifest
from ppi.replay.replay import changed_inputs, load_manifest
from ppi.storage.files import PlotSeries, ReportWriter, dump_json, sha256_file


def test_json_is_sorted_and_newline_terminated():
    data = dump_json({"b": 1, "a": [1.5, 2]})
    assert data.endswith(b"\n")
    assert data.index(b'"a"') < data.index(b'"b"')


def test_writer_records_relative_paths(tmp_path):
    w = ReportWriter(tmp_path / "out")
    w.write_json("summary.json", {"x": 1})
    w.write_csv("sub/table.csv", pd.DataFrame({"v": [0.1, 1 / 3]}))
    w.write_json("summary.json", {"x": 2})
    assert w.written == ["summary.json", "sub/table.csv"]
    assert (tmp_path / "out" / "sub" / "table.csv").read_text() == "v\n0.1\n0.333333333333\n"


def test_plot_series_drops_non_finite(tmp_path):
    w = ReportWriter(tmp_path)
    w.write_series("s.json", [PlotSeries("line", [0, 1, 2], [0.5, math.nan, math.inf], err=[0.1, 0.1, 0.1])])
    series = orjson.loads((tmp_path / "s.json").read_bytes())["series"][0]
    assert series["name"] == "line"
    assert series["y"] == [0.5, None, None]
    assert series["x"] == [0, 1, 2]


def _manifest(tmp_path, inputs):
    m = RunManifest(command="simulate", seed=0, out_dir=str(tmp_path), tool_version="0.1.0", inputs=inputs)
    (tmp_path / "manifest.json").write_bytes(dump_json(m.model_dump(mode="json")))
    return m


def test_manifest_roundtrip_and_changed_inputs(tmp_path):
    src = tmp_path / "in.csv"
    src.write_text("a\n1\n")
    m = _manifest(tmp_path, {src.as_posix(): sha256_file(src)})
    loaded = load_manifest(tmp_path)
    assert loaded == m
    assert changed_inputs(loaded) == []
    src.write_text("a\n2\n")
    assert changed_inputs(loaded) == [src.as_posix()]


def test_manifest_schema_rejects_unknown_command(tmp_path):
    (tmp_path / "manifest.json").write_bytes(
        dump_json({"schemaVersion": "v1", "command": "explode", "parameters": {}, "seed": 0, "out_dir": ".", "tool_version": "0", "inputs": {}})
    )
    with pytest.raises(SchemaError, match="schema"):
        load_manifest(tmp_path / "manifest.json")


def test_missing_manifest(tmp_path):
    with pytest.raises(SchemaError, match="not found"):
        load_manifest(tmp_path)
