from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ppi.errors import DomainError

UNASSIGNED_PILLAR = "unassigned"


@dataclass(frozen=True)
class IndicatorFlags:
    """Per-indicator normalization flags (``n2``: percentile skew rule, ``switch``: inverted)."""

    skew_corrected: bool = False
    inverted: bool = False


@dataclass(eq=False)
class IndicatorPanel:
    """Country × year × indicator panel.

    ``values[c, y, i]`` is indicator ``i`` of country ``c`` in year ``y``. Values
    are raw until the panel has been through :func:`ppi.pipeline.normalize.normalize_panel`.
    """

    countries: list[str]
    years: list[int]
    indicators: list[str]
    values: np.ndarray
    pillars: dict[str, str] = field(default_factory=dict)
    flags: dict[str, IndicatorFlags] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        expected = (len(self.countries), len(self.years), len(self.indicators))
        if self.values.shape != expected:
            raise DomainError(f"panel values have shape {self.values.shape}, expected {expected}")
        for name, seq in (("countries", self.countries), ("years", self.years), ("indicators", self.indicators)):
            if len(set(seq)) != len(seq):
                raise DomainError(f"duplicate {name} in panel")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise DomainError("panel years must be strictly increasing")
        unknown = sorted(set(self.pillars) - set(self.indicators))
        if unknown:
            raise DomainError(f"pillar map names unknown indicators: {', '.join(unknown)}")
        self.pillars = {i: self.pillars.get(i, UNASSIGNED_PILLAR) for i in self.indicators}

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape  # type: ignore[return-value]

    def country_index(self, country: str) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise DomainError(f"unknown country {country!r}") from None

    def indicator_index(self, indicator: str) -> int:
        try:
            return self.indicators.index(indicator)
        except ValueError:
            raise DomainError(f"unknown indicator {indicator!r}") from None

    def series(self, country: str) -> np.ndarray:
        """Indicators × years matrix for one country."""
        return self.values[self.country_index(country)].T.copy()

    def first_year(self, country: str) -> np.ndarray:
        return self.values[self.country_index(country), 0].copy()

    def last_year(self, country: str) -> np.ndarray:
        return self.values[self.country_index(country), -1].copy()

    def time_average(self) -> np.ndarray:
        """Countries × indicators matrix of per-country time means."""
        return self.values.mean(axis=1)

    def pillar_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for ind in self.indicators:
            seen.setdefault(self.pillars[ind], None)
        return list(seen)

    def pillar_members(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {p: [] for p in self.pillar_names()}
        for idx, ind in enumerate(self.indicators):
            out[self.pillars[ind]].append(idx)
        return out

    def without(self, indicators: list[str]) -> IndicatorPanel:
        """Copy of the panel with the named indicators removed."""
        drop = {self.indicator_index(i) for i in indicators}
        keep = [k for k in range(len(self.indicators)) if k not in drop]
        names = [self.indicators[k] for k in keep]
        return IndicatorPanel(
            countries=list(self.countries),
            years=list(self.years),
            indicators=names,
            values=self.values[:, :, keep].copy(),
            pillars={i: self.pillars[i] for i in names},
            flags={i: self.flags[i] for i in names if i in self.flags},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndicatorPanel):
            return NotImplemented
        return (
            self.countries == other.countries
            and self.years == other.years
            and self.indicators == other.indicators
            and self.pillars == other.pillars
            and self.flags == other.flags
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class ClusterAssignment:
    """Country → cluster label, labels ``1..k`` ordered by descending mean feature level."""

    labels: dict[str, int]
    k: int

    def __post_init__(self) -> None:
        used = set(self.labels.values())
        if used != set(range(1, self.k + 1)):
            raise DomainError(f"cluster labels {sorted(used)} do not cover 1..{self.k}")

    def members(self, label: int) -> list[str]:
        return [c for c, lab in self.labels.items() if lab == label]

    def label_of(self, country: str) -> int:
        try:
            return self.labels[country]
        except KeyError:
            raise DomainError(f"country {country!r} has no cluster") from None
