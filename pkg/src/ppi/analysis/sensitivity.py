from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike

from ppi.analysis.metrics import spearman_test, top_k_jaccard
from ppi.errors import DomainError
from ppi.game.ensemble import EnsembleResult, run_monte_carlo
from ppi.models.country import CountrySetup
from ppi.models.simulation import MechanismToggles

logger = logging.getLogger(__name__)

BASELINE = "full-model"

PRESETS: dict[str, MechanismToggles] = {
    BASELINE: MechanismToggles.full_model(),
    "no-government": MechanismToggles.random_government(),
    "no-servants": MechanismToggles.random_servants(),
    "no-network": MechanismToggles.no_network(),
    "fixed-supervision": MechanismToggles.fixed_supervision_at(0.5),
}


def preset(name: str) -> MechanismToggles:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown sensitivity preset {name!r} (known: {', '.join(PRESETS)})") from None


@dataclass(frozen=True)
class StrengthBin:
    lower: float
    upper: float
    mean_strength: float
    mean_contribution: float
    count: int


def strength_bins(
    strengths: ArrayLike, contributions: ArrayLike, bins: int = 20, min_count: int = 3
) -> list[StrengthBin]:
    """Equal-width bins over the observed incoming-strength range.

    Bins with fewer than ``min_count`` observations are merged into the next
    bin to the right; a short remainder at the right end joins the last
    closed bin.
    """
    s = np.asarray(strengths, dtype=float)
    c = np.asarray(contributions, dtype=float)
    if s.shape != c.shape or s.ndim != 1 or s.size == 0:
        raise DomainError("strengths and contributions must be non-empty vectors of equal length")
    lo, hi = float(s.min()), float(s.max())
    if hi == lo:
        return [StrengthBin(lo, hi, lo, float(c.mean()), int(s.size))]
    edges = np.linspace(lo, hi, bins + 1)
    idx = np.minimum(np.searchsorted(edges, s, side="right") - 1, bins - 1)

    groups: list[tuple[int, int]] = []  # (first bin, last bin) inclusive
    start = 0
    pending = 0
    for b in range(bins):
        pending += int(np.sum(idx == b))
        if pending >= min_count:
            groups.append((start, b))
            start = b + 1
            pending = 0
    if pending:
        if groups:
            groups[-1] = (groups[-1][0], bins - 1)
        else:
            groups.append((0, bins - 1))

    out = []
    for first, last in groups:
        mask = (idx >= first) & (idx <= last)
        if not mask.any():
            continue
        out.append(
            StrengthBin(
                lower=float(edges[first]),
                upper=float(edges[last + 1]),
                mean_strength=float(s[mask].mean()),
                mean_contribution=float(c[mask].mean()),
                count=int(mask.sum()),
            )
        )
    return out


def free_riding_test(bins: Sequence[StrengthBin]) -> tuple[float, float]:
    """Spearman (coefficient, p-value) between binned strength and binned contribution."""
    return spearman_test([b.mean_strength for b in bins], [b.mean_contribution for b in bins])


@dataclass
class SensitivityReport:
    variants: list[str]
    countries: list[str]
    ensembles: dict[str, dict[str, EnsembleResult]] = field(default_factory=dict)
    strengths: dict[str, np.ndarray] = field(default_factory=dict)

    def result(self, variant: str, country: str) -> EnsembleResult | None:
        return self.ensembles.get(variant, {}).get(country)

    def point_estimates(self) -> pd.DataFrame:
        rows = []
        for v in self.variants:
            for c in self.countries:
                r = self.result(v, c)
                rows.append(
                    {
                        "variant": v,
                        "country": c,
                        "corruption": np.nan if r is None else r.mean_corruption,
                        "corruption_stderr": np.nan if r is None else r.corruption_stderr,
                        "performance": np.nan if r is None else r.mean_performance,
                        "nonconverged": np.nan if r is None else r.nonconverged,
                    }
                )
        return pd.DataFrame(rows)

    def deltas(self) -> pd.DataFrame:
        """Per-country change of each variant's point estimates relative to the full model."""
        est = self.point_estimates().set_index(["variant", "country"])
        base = est.loc[BASELINE]
        rows = []
        for v in self.variants:
            if v == BASELINE:
                continue
            cur = est.loc[v]
            for c in self.countries:
                rows.append(
                    {
                        "variant": v,
                        "country": c,
                        "corruption_delta": cur.at[c, "corruption"] - base.at[c, "corruption"],
                        "performance_delta": cur.at[c, "performance"] - base.at[c, "performance"],
                    }
                )
        return pd.DataFrame(rows, columns=["variant", "country", "corruption_delta", "performance_delta"])

    def correlations(self) -> pd.DataFrame:
        """Cross-country Spearman correlation between corruption and performance per variant."""
        est = self.point_estimates().dropna(subset=["corruption", "performance"])
        rows = []
        for v in self.variants:
            sub = est[est["variant"] == v]
            try:
                rho, p = spearman_test(sub["corruption"].to_numpy(), sub["performance"].to_numpy())
            except DomainError as e:
                logger.info(f"No corruption-performance correlation for {v}: {e}")
                rho, p = np.nan, np.nan
            rows.append({"variant": v, "spearman": rho, "pvalue": p, "countries": len(sub)})
        return pd.DataFrame(rows)

    def strength_bins(self, variant: str, bins: int = 20, min_count: int = 3) -> list[StrengthBin]:
        """Pooled (country, issue) observations of incoming strength against mean contribution.

        Strength always comes from the estimated network, so the no-network
        variant can be compared on the same axis.
        """
        s, c = [], []
        for country in self.countries:
            r = self.result(variant, country)
            if r is None:
                continue
            s.append(self.strengths[country])
            c.append(r.mean_contribution)
        if not s:
            raise DomainError(f"no converged ensembles for variant {variant}")
        return strength_bins(np.concatenate(s), np.concatenate(c), bins=bins, min_count=min_count)

    def jaccard(self, variant: str, k: int = 10) -> pd.DataFrame:
        """Top-k Jaccard between each country's full-model and variant allocation profiles."""
        rows = []
        for c in self.countries:
            a, b = self.result(BASELINE, c), self.result(variant, c)
            j = np.nan if a is None or b is None else top_k_jaccard(a.mean_allocation, b.mean_allocation, k)
            rows.append({"country": c, "variant": variant, "jaccard": j})
        return pd.DataFrame(rows)


def sensitivity_suite(
    setups: Sequence[CountrySetup],
    variants: Sequence[str] = tuple(PRESETS),
    runs: int = 1000,
    *,
    seed: int = 0,
    jobs: int = 1,
    **simulation: Any,
) -> SensitivityReport:
    """Rerun every country's ensemble with one mechanism switched off at a time.

    All variants share the master seed, so a variant identical to the full
    model reproduces it exactly.
    """
    names = [BASELINE] + [v for v in variants if v != BASELINE]
    report = SensitivityReport(
        variants=names,
        countries=[s.name for s in setups],
        strengths={s.name: s.network.in_strength(s.gamma) for s in setups},
    )
    for v in names:
        toggles = preset(v)
        per_country: dict[str, EnsembleResult] = {}
        for setup in setups:
            config = setup.config(toggles=toggles, seed=seed, **simulation)
            result = run_monte_carlo(config, setup.network, runs=runs, jobs=jobs, mode=v)
            if not result.any_converged:
                logger.warning(f"Sensitivity {v}: {setup.name} skipped, no run converged")
                continue
            per_country[setup.name] = result
        report.ensembles[v] = per_country
        logger.info(f"Sensitivity {v}: {len(per_country)}/{len(setups)} countries")
    return report
