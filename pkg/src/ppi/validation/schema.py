from __future__ import annotations

import json
import pathlib
from typing import Iterable

import pandas as pd
from jsonschema import Draft202012Validator

from ppi.errors import SchemaError

_schema = None


def load_manifest_schema() -> dict:
    global _schema
    if _schema is None:
        schema_path = pathlib.Path(__file__).parent.parent / "models" / "manifest_schema.json"
        _schema = json.loads(schema_path.read_text())
    return _schema


def validate_manifest_json(data: dict) -> None:
    schema = load_manifest_schema()
    Draft202012Validator(schema).validate(data)


def require_columns(df: pd.DataFrame, columns: Iterable[str], *, path: str | None = None) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SchemaError("missing required columns", path=path, columns=missing)


def require_numeric(df: pd.DataFrame, column: str, *, path: str | None = None) -> pd.Series:
    """Coerce a column to float, reporting non-numeric rows by their 1-based file line."""
    values = pd.to_numeric(df[column], errors="coerce")
    bad = values.isna() & df[column].notna()
    if bad.any():
        # +2: header line and 1-based numbering
        rows = [int(i) + 2 for i in df.index[bad]]
        raise SchemaError(f"non-numeric values in column {column}", path=path, rows=rows, columns=[column])
    return values


def reject_duplicates(df: pd.DataFrame, keys: list[str], *, path: str | None = None) -> None:
    dup = df.duplicated(subset=keys, keep="first")
    if dup.any():
        rows = [int(i) + 2 for i in df.index[dup]]
        raise SchemaError(f"duplicate ({', '.join(keys)}) rows", path=path, rows=rows, columns=keys)
