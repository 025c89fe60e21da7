from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import orjson
import pandas as pd

_JSON_OPTS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def dump_json(obj: Any) -> bytes:
    return orjson.dumps(obj, option=_JSON_OPTS) + b"\n"


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class PlotSeries:
    """One line of a plot: x values, y values and optional error bars."""

    name: str
    x: Sequence[Any]
    y: Sequence[float]
    err: Sequence[float] | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "x": list(np.asarray(self.x).tolist()),
            "y": [_finite(v) for v in np.asarray(self.y, dtype=float)],
            "err": None if self.err is None else [_finite(v) for v in np.asarray(self.err, dtype=float)],
        }


def _finite(v: float) -> float | None:
    return float(v) if np.isfinite(v) else None


@dataclass
class ReportWriter:
    """Owns one output directory and remembers every file it wrote, in order."""

    out_dir: Path
    written: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def _record(self, p: Path) -> Path:
        rel = p.resolve().relative_to(self.out_dir.resolve()).as_posix()
        if rel not in self.written:
            self.written.append(rel)
        return p

    def write_bytes(self, name: str, data: bytes) -> Path:
        p = self.path(name)
        p.write_bytes(data)
        return self._record(p)

    def write_json(self, name: str, obj: Any) -> Path:
        return self.write_bytes(name, dump_json(obj))

    def write_csv(self, name: str, df: pd.DataFrame, *, index: bool = False) -> Path:
        p = self.path(name)
        df.to_csv(p, index=index, float_format="%.12g", lineterminator="\n")
        return self._record(p)

    def write_series(self, name: str, series: Iterable[PlotSeries]) -> Path:
        return self.write_json(name, {"series": [s.as_dict() for s in series]})

    def adopt(self, p: Path) -> Path:
        """Record a file some other writer put inside the output directory."""
        return self._record(Path(p))
