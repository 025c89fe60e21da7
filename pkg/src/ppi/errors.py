from __future__ import annotations

from typing import Iterable, Sequence


class PPIError(Exception):
    """Base class for every error raised on purpose by this package."""


class DomainError(PPIError, ValueError):
    """An argument lies outside the domain of a function."""


class ContractViolation(PPIError, ValueError):
    """A behavioural contract of the game was broken (e.g. a contribution above its allocation)."""


class EstimationError(PPIError, ValueError):
    """Network estimation cannot proceed with the data it was given."""


class ConvergenceError(PPIError, RuntimeError):
    """Raised in strict mode when simulation runs do not converge."""


class SchemaError(PPIError, ValueError):
    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        rows: Sequence[int] = (),
        columns: Sequence[str] = (),
    ):
        self.path = path
        self.rows = list(rows)
        self.columns = list(columns)
        parts = [message]
        if path:
            parts.append(f"file={path}")
        if self.columns:
            parts.append(f"columns={','.join(self.columns)}")
        if self.rows:
            shown = ",".join(str(r) for r in self.rows[:20])
            more = f" (+{len(self.rows) - 20} more)" if len(self.rows) > 20 else ""
            parts.append(f"rows={shown}{more}")
        super().__init__("; ".join(parts))


class MissingDataError(SchemaError):
    """Panel cells are missing; imputation is left to an external hook."""

    def __init__(self, cells: Iterable[tuple[str, int, str]], *, path: str | None = None):
        self.cells = list(cells)
        shown = ", ".join(f"({c}, {y}, {i})" for c, y, i in self.cells[:10])
        more = f" (+{len(self.cells) - 10} more)" if len(self.cells) > 10 else ""
        super().__init__(f"missing panel cells: {shown}{more}", path=path)
