from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterator, Optional

import numpy as np
import pandas as pd
import typer
from pydantic import ValidationError

from ppi import __version__
from ppi.analysis.footprints import candidates_above, footprints
from ppi.analysis.retrospective import country_setup, rank_stability, retrospective
from ppi.analysis.sensitivity import BASELINE, PRESETS, free_riding_test, sensitivity_suite
from ppi.analysis.validation import (
    cluster_adjacency,
    cluster_pillar_table,
    corruption_performance_table,
    cumulative_series,
    empirical_levels,
    network_similarity_matrix,
    regression_r_squared,
)
from ppi.calibration.corruption import CorruptionTable
from ppi.calibration.jump import calibrate_gammas
from ppi.calibration.ratios import homogeneous_mse
from ppi.errors import ConvergenceError, DomainError, PPIError
from ppi.game.ensemble import derive_seeds, run_monte_carlo
from ppi.game.simulation import run_simulation
from ppi.models.country import CountrySetup
from ppi.models.network import SpilloverNetwork
from ppi.models.panel import ClusterAssignment, IndicatorPanel
from ppi.models.reports import AllocationProfile, GammaGrid, RunManifest
from ppi.network.estimate import estimate_all
from ppi.network.io import network_path, read_adjacency, read_networks, write_adjacency
from ppi.network.synthetic import demo_targets, erdos_renyi_network
from ppi.observability.metrics import NONCONVERGED_RUNS, write_metrics
from ppi.pipeline.clustering import ward_cluster
from ppi.pipeline.io import load_clusters, load_country_values, load_gdp, load_panel, save_panel
from ppi.pipeline.normalize import normalize_panel
from ppi.replay.replay import MANIFEST_NAME, replay_manifest
from ppi.storage.files import PlotSeries, ReportWriter, sha256_file
from ppi.utils.config import RunConfig, Settings
from ppi.utils.logging import configure_logging
from ppi.validation.schema import validate_manifest_json

app = typer.Typer(add_completion=False, help="Infer policy priorities from development indicator panels.")
logger = logging.getLogger(__name__)


def _nonconverged_total() -> float:
    return sum(
        s.value for m in NONCONVERGED_RUNS.collect() for s in m.samples if s.name.endswith("_total")
    )


class CommandRun:
    """Output directory, resolved config and input digests of one command invocation."""

    def __init__(self, command: str, params: dict[str, Any], config: Optional[Path], overrides: dict[str, dict[str, Any]]):
        settings = Settings()
        self.command = command
        self.params = {k: str(v) if isinstance(v, Path) else v for k, v in params.items()}
        self.config_path = None if config is None else Path(config)
        self.cfg = RunConfig.load(self.config_path, overrides)
        out = params.get("out")
        self.writer = ReportWriter(Path(out) if out else settings.OUT_DIR)
        self.strict = bool(params.get("strict", False))
        self.inputs: dict[str, str] = {}
        self._nonconverged_start = _nonconverged_total()
        if self.config_path is not None:
            self.input(self.config_path)

    def input(self, path: Path | str) -> Path:
        p = Path(path)
        if p.is_file():
            self.inputs[p.as_posix()] = sha256_file(p)
        return p

    @property
    def simulation(self) -> dict[str, Any]:
        s = self.cfg.simulation
        return {"epsilon": s.epsilon, "target_tol": s.target_tol, "max_steps": s.max_steps}

    def finish(self) -> RunManifest:
        nonconverged = int(_nonconverged_total() - self._nonconverged_start)
        if nonconverged:
            typer.echo(f"Warning: {nonconverged} runs did not converge and were excluded", err=True)
            if self.strict:
                raise ConvergenceError(f"{nonconverged} runs did not converge (--strict)")
        manifest = RunManifest(
            command=self.command,
            parameters=self.params,
            config_path=None if self.config_path is None else self.config_path.as_posix(),
            seed=self.cfg.run.seed,
            out_dir=self.writer.out_dir.as_posix(),
            tool_version=__version__,
            inputs=dict(sorted(self.inputs.items())),
            outputs=list(self.writer.written),
        )
        data = manifest.model_dump(mode="json")
        validate_manifest_json(data)
        self.writer.write_json(MANIFEST_NAME, data)
        return manifest


@contextmanager
def _command(
    name: str,
    params: dict[str, Any],
    overrides: dict[str, dict[str, Any]] | None = None,
) -> Iterator[CommandRun]:
    settings = Settings()
    try:
        run = CommandRun(name, params, params.get("config"), overrides or {})
        yield run
        run.finish()
        typer.echo(f"Wrote {len(run.writer.written) + 1} files to {run.writer.out_dir}")
    except (PPIError, ValidationError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1) from None
    finally:
        if settings.METRICS_FILE is not None:
            write_metrics(settings.METRICS_FILE)


def _run_overrides(seed: Optional[int], runs: Optional[int] = None, jobs: Optional[int] = None) -> dict[str, dict[str, Any]]:
    return {"run": {"seed": seed, "runs": runs, "jobs": jobs}}


def _split(values: Optional[str]) -> list[str] | None:
    if not values:
        return None
    return [v.strip() for v in values.split(",") if v.strip()]


def _required(value: Optional[str], key: str) -> str:
    if not value:
        raise DomainError(f"config [indicators] {key} is not set")
    return value


def _simulation_panel(run: CommandRun, panel: IndicatorPanel) -> IndicatorPanel:
    """The panel without the corruption indicator, which is never simulated."""
    corruption = run.cfg.indicators.corruption
    if corruption and corruption in panel.indicators:
        return panel.without([corruption])
    return panel


def _load_setups(
    run: CommandRun,
    panel: IndicatorPanel,
    networks: Path,
    countries: list[str] | None,
    gammas: Optional[Path],
    budgets: Optional[Path],
) -> list[CountrySetup]:
    ind = run.cfg.indicators
    rule_of_law = _required(ind.rule_of_law, "rule_of_law")
    control = _required(ind.control_of_corruption, "control_of_corruption")
    sim_panel = _simulation_panel(run, panel)
    names = countries or list(sim_panel.countries)
    for c in names:
        sim_panel.country_index(c)
    nets = read_networks(Path(networks), names)
    for c in names:
        run.input(network_path(Path(networks), c))
    gamma_map = load_country_values(run.input(gammas), "gamma") if gammas else {}
    budget_map = load_country_values(run.input(budgets), "budget") if budgets else {}
    return [
        country_setup(
            sim_panel,
            c,
            nets[c],
            rule_of_law=rule_of_law,
            control_of_corruption=control,
            budget=budget_map.get(c, run.cfg.simulation.budget),
            gamma=gamma_map.get(c, run.cfg.simulation.gamma),
        )
        for c in names
    ]


def _load_panel(run: CommandRun, panel: Path, pillars: Optional[Path]) -> IndicatorPanel:
    return load_panel(run.input(panel), run.input(pillars) if pillars else None)


def _profile_frames(profiles: list[AllocationProfile]) -> tuple[pd.DataFrame, pd.DataFrame]:
    rows = []
    pillar_rows = []
    for p in profiles:
        for name, mean, err in zip(p.indicators, p.mean, p.stderr):
            rows.append(
                {
                    "country": p.country,
                    "target": p.target_country or "",
                    "indicator": name,
                    "pillar": p.pillars.get(name, "unassigned"),
                    "mean": mean,
                    "stderr": err,
                }
            )
        means = p.pillar_means()
        for pillar, total in p.pillar_totals().items():
            pillar_rows.append(
                {"country": p.country, "target": p.target_country or "", "pillar": pillar, "total": total, "mean": means[pillar]}
            )
    return pd.DataFrame(rows), pd.DataFrame(pillar_rows)


@app.callback()
def main(log_level: Optional[str] = typer.Option(None, help="Override PPI_LOG_LEVEL")):
    """Batch commands; every output directory receives a manifest.json."""
    s = Settings()
    configure_logging(log_level or s.LOG_LEVEL, s.LOG_JSON)


@app.command()
def normalize(
    panel: Path = typer.Option(..., help="Raw long-format panel CSV (country,year,indicator,value)"),
    pillars: Optional[Path] = typer.Option(None, help="Pillar map CSV (indicator,pillar)"),
    gdp: Optional[Path] = typer.Option(None, help="GDP per capita CSV (country,year,value) used for orientation"),
    skew_rule: bool = typer.Option(True, help="Percentile bounds for heavily skewed indicators"),
    clusters: bool = typer.Option(True, help="Also write Ward cluster labels"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
):
    """Normalize a raw panel to [0, 1], orient indicators and cluster countries."""
    params = dict(locals())
    with _command("normalize", params) as run:
        raw = _load_panel(run, panel, pillars)
        gdp_matrix = load_gdp(run.input(gdp), raw) if gdp else None
        norm = normalize_panel(raw, gdp_matrix, skew_rule=skew_rule)
        w = run.writer
        for p in save_panel(norm, w.path("panel.csv"), w.path("pillars.csv"), w.path("flags.csv")):
            w.adopt(p)
        if clusters:
            k = run.cfg.analysis.clusters
            if len(norm.countries) < k:
                logger.warning(f"{len(norm.countries)} countries; skipping {k}-cluster Ward assignment")
            else:
                assignment = ward_cluster(_simulation_panel(run, norm), k)
                w.write_csv(
                    "clusters.csv",
                    pd.DataFrame({"country": list(assignment.labels), "cluster": list(assignment.labels.values())}),
                )


@app.command("estimate-network")
def estimate_network(
    panel: Path = typer.Option(..., help="Normalized panel CSV"),
    country: Optional[str] = typer.Option(None, help="Single country to estimate"),
    all_countries: bool = typer.Option(False, "--all", help="Estimate every country in the panel"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed (recorded only; estimation is deterministic)"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Estimate one spillover network per country (adjacency CSV under networks/)."""
    params = dict(locals())
    with _command("estimate-network", params, _run_overrides(seed, jobs=jobs)) as run:
        if not all_countries and not country:
            raise DomainError("pass --country or --all")
        data = _simulation_panel(run, load_panel(run.input(panel)))
        names = None if all_countries else [country]
        net = run.cfg.network
        results = estimate_all(
            data,
            names,
            jobs=run.cfg.run.jobs,
            differencing=net.differencing,
            shrinkage=net.shrinkage,
            tie_tol=net.tie_tol,
        )
        reports = []
        for c, (network, report) in results.items():
            run.writer.adopt(write_adjacency(network, run.writer.path(f"networks/{c}.csv")))
            reports.append(report.as_dict())
        run.writer.write_json("estimation_report.json", {"networks": reports})
        if len(results) > 1:
            # most developed first
            level = dict(zip(data.countries, data.time_average().mean(axis=1)))
            order = sorted(results, key=lambda c: (-level[c], c))
            similarity = network_similarity_matrix({c: pair[0] for c, pair in results.items()}, order)
            similarity.index.name = "country"
            run.writer.write_csv("network_similarity.csv", similarity, index=True)


@app.command()
def simulate(
    panel: Optional[Path] = typer.Option(None, help="Normalized panel CSV (omit for the synthetic demo)"),
    network: Optional[Path] = typer.Option(None, help="Adjacency CSV for --country"),
    country: Optional[str] = typer.Option(None, help="Country whose first/last years set initials/targets"),
    nodes: int = typer.Option(50, help="Demo network size"),
    edges: int = typer.Option(100, help="Demo network edge count"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    runs: Optional[int] = typer.Option(None, help="Monte Carlo runs"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Run the allocation game: one illustrative run plus a Monte Carlo ensemble."""
    params = dict(locals())
    with _command("simulate", params, _run_overrides(seed, runs, jobs)) as run:
        master = run.cfg.run.seed
        if panel is None and network is None and country is None:
            net = erdos_renyi_network(nodes, edges, seed=master)
            T, I0 = demo_targets(nodes, master)
            setup = CountrySetup(
                name="demo",
                network=net,
                initial=I0,
                targets=T,
                rule_of_law_idx=0,
                control_of_corruption_idx=1,
                indicators=tuple(f"i{k:02d}" for k in range(nodes)),
                budget=run.cfg.simulation.budget,
                gamma=run.cfg.simulation.gamma,
            )
        elif panel is not None and network is not None and country is not None:
            data = _simulation_panel(run, _load_panel(run, panel, None))
            ind = run.cfg.indicators
            setup = country_setup(
                data,
                country,
                read_adjacency(run.input(network)),
                rule_of_law=_required(ind.rule_of_law, "rule_of_law"),
                control_of_corruption=_required(ind.control_of_corruption, "control_of_corruption"),
                budget=run.cfg.simulation.budget,
                gamma=run.cfg.simulation.gamma,
            )
        else:
            raise DomainError("pass --panel, --network and --country together, or none of them for the demo")

        config_one = setup.config(seed=derive_seeds(master, 1)[0], **run.simulation)
        trace = run_simulation(config_one, setup.network)
        x = list(range(trace.steps + 1))
        series = []
        for k, name in enumerate(setup.indicators):
            series.append(PlotSeries(f"indicator:{name}", x, trace.indicators[:, k]))
            series.append(PlotSeries(f"contribution:{name}", x, trace.contributions[:, k]))
            series.append(PlotSeries(f"allocation:{name}", x, trace.allocations[:, k]))
        run.writer.write_series("run_series.json", series)

        result = run_monte_carlo(
            setup.config(seed=master, **run.simulation),
            setup.network,
            runs=run.cfg.run.runs,
            jobs=run.cfg.run.jobs,
            mode="simulate",
        )
        run.writer.write_csv(
            "allocation.csv",
            pd.DataFrame(
                {
                    "indicator": list(setup.indicators),
                    "target": setup.targets,
                    "initial": setup.initial,
                    "mean_allocation": result.mean_allocation,
                    "allocation_stderr": result.allocation_stderr,
                    "mean_contribution": result.mean_contribution,
                }
            ),
        )
        run.writer.write_json(
            "summary.json",
            {
                "country": setup.name,
                "runs": len(result.runs),
                "nonconverged": result.nonconverged,
                "corruption": result.mean_corruption,
                "corruption_stderr": result.corruption_stderr,
                "performance": result.mean_performance,
                "mean_steps": float(np.mean([r.steps for r in result.converged_runs])) if result.any_converged else None,
                "illustrative_run": {"steps": trace.steps, "converged": trace.converged, "targets_met": trace.targets_met},
            },
        )


@app.command()
def calibrate(
    panel: Path = typer.Option(..., help="Normalized panel CSV including the corruption indicator"),
    networks: Path = typer.Option(..., help="Directory of <country>.csv adjacency files"),
    countries: Optional[str] = typer.Option(None, help="Comma-separated countries (default: all)"),
    budgets: Optional[Path] = typer.Option(None, help="Per-country budgets CSV (country,budget)"),
    gamma_min: Optional[float] = typer.Option(None, help="Smallest candidate γ [1]"),
    gamma_max: Optional[float] = typer.Option(None, help="Largest candidate γ [30]"),
    gamma_points: Optional[int] = typer.Option(None, help="Grid resolution [117]"),
    samples: Optional[int] = typer.Option(None, help="Random γ subsets for the jump method [10000]"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    runs: Optional[int] = typer.Option(None, help="Monte Carlo runs per (country, γ) [100]"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Calibrate per-country γ with the ratios method and pick how many distinct values to keep."""
    params = dict(locals())
    overrides = _run_overrides(seed, jobs=jobs)
    overrides["calibration"] = {
        "gamma_min": gamma_min,
        "gamma_max": gamma_max,
        "gamma_points": gamma_points,
        "runs": runs,
        "subset_samples": samples,
    }
    with _command("calibrate", params, overrides) as run:
        cal = run.cfg.calibration
        master = run.cfg.run.seed
        corruption = _required(run.cfg.indicators.corruption, "corruption")
        data = load_panel(run.input(panel))
        setups = _load_setups(run, data, networks, _split(countries), None, budgets)
        names = [s.name for s in setups]
        observed = empirical_levels(data, corruption)
        empirical = {c: float(observed.at[c, "empirical_corruption"]) for c in names}

        grid = GammaGrid.linspace(cal.gamma_min, cal.gamma_max, cal.gamma_points)
        table = CorruptionTable(setups, runs=cal.runs, seed=master, **run.simulation).matrix(grid, jobs=run.cfg.run.jobs)
        selected, jump, search = calibrate_gammas(names, grid, empirical, table, samples=cal.subset_samples, seed=master)

        w = run.writer
        w.write_csv("gammas.csv", pd.DataFrame({"country": names, "gamma": [selected.assignment[c] for c in names]}))
        w.write_csv(
            "corruption_table.csv",
            pd.DataFrame(table, index=pd.Index(names, name="country"), columns=[f"{g:.6g}" for g in grid.values]),
            index=True,
        )
        w.write_csv(
            "jump.csv",
            pd.DataFrame(
                {"size": jump.sizes, "mse": jump.mse, "inverse_rmse": jump.inverse_rmse, "jump": jump.jumps}
            ),
        )

        # simulated levels rescaled to the reference country's empirical level
        g_idx = {c: grid.index(selected.assignment[c]) for c in names}
        r = names.index(selected.reference_country)
        D = np.array([table[k, g_idx[c]] for k, c in enumerate(names)])
        scaled = D / D[r] * empirical[selected.reference_country]
        emp = np.array([empirical[c] for c in names])
        try:
            r2 = regression_r_squared(scaled, emp)
        except DomainError:
            r2 = float("nan")
        w.write_csv("corruption_validation.csv", pd.DataFrame({"country": names, "empirical": emp, "simulated": scaled}))
        cum = cumulative_series(empirical, dict(zip(names, scaled)))
        w.write_series(
            "cumulative_corruption.json",
            [
                PlotSeries("empirical", cum["country"], cum["empirical_cumulative"]),
                PlotSeries("simulated", cum["country"], cum["simulated_cumulative"]),
            ],
        )

        stability = []
        if len(selected.gammas) > 1:
            for setup in setups:
                profiles = [
                    retrospective(setup.with_gamma(g), cal.runs, seed=master, jobs=run.cfg.run.jobs, **run.simulation)[0].as_array()
                    for g in selected.gammas
                ]
                stability.append({"country": setup.name, "min_spearman": rank_stability(profiles)})
            w.write_csv("rank_stability.csv", pd.DataFrame(stability))

        w.write_json(
            "calibration.json",
            {
                "h_star": jump.h_star,
                "gammas": list(selected.gammas),
                "reference_country": selected.reference_country,
                "reference_gamma": selected.reference_gamma,
                "mse": selected.mse,
                "homogeneous_mse": homogeneous_mse(names, grid, empirical, table),
                "subsets_evaluated": search.evaluated,
                "r_squared": r2,
            },
        )


@app.command("retrospective")
def retrospective_cmd(
    panel: Path = typer.Option(..., help="Normalized panel CSV"),
    networks: Path = typer.Option(..., help="Directory of <country>.csv adjacency files"),
    pillars: Optional[Path] = typer.Option(None, help="Pillar map CSV (indicator,pillar)"),
    countries: Optional[str] = typer.Option(None, help="Comma-separated countries (default: all)"),
    gammas: Optional[Path] = typer.Option(None, help="Calibrated γ CSV (country,gamma)"),
    budgets: Optional[Path] = typer.Option(None, help="Per-country budgets CSV (country,budget)"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    runs: Optional[int] = typer.Option(None, help="Monte Carlo runs per country [1000]"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Infer each country's allocation profile from its first to its last observed year."""
    params = dict(locals())
    with _command("retrospective", params, _run_overrides(seed, runs, jobs)) as run:
        data = _load_panel(run, panel, pillars)
        setups = _load_setups(run, data, networks, _split(countries), gammas, budgets)
        profiles = []
        summary = {}
        for setup in setups:
            profile, result = retrospective(
                setup, run.cfg.run.runs, seed=run.cfg.run.seed, jobs=run.cfg.run.jobs, **run.simulation
            )
            profiles.append(profile)
            summary[setup.name] = {
                "runs": len(result.runs),
                "nonconverged": result.nonconverged,
                "corruption": result.mean_corruption,
                "performance": result.mean_performance,
                "top_pillar": profile.top_pillar(),
            }
        by_issue, by_pillar = _profile_frames(profiles)
        run.writer.write_csv("profiles.csv", by_issue)
        run.writer.write_csv("pillar_profiles.csv", by_pillar)
        run.writer.write_series(
            "profiles.json", [PlotSeries(p.country, list(p.indicators), p.mean, p.stderr) for p in profiles]
        )
        run.writer.write_json("summary.json", summary)


@app.command()
def prospective(
    panel: Path = typer.Option(..., help="Normalized panel CSV"),
    networks: Path = typer.Option(..., help="Directory of <country>.csv adjacency files"),
    pillars: Optional[Path] = typer.Option(None, help="Pillar map CSV (indicator,pillar)"),
    followers: Optional[str] = typer.Option(None, help="Comma-separated followers (default: all outside cluster 1)"),
    clusters: Optional[Path] = typer.Option(None, help="Cluster CSV (country,cluster); Ward clusters when omitted"),
    gammas: Optional[Path] = typer.Option(None, help="Calibrated γ CSV (country,gamma)"),
    budgets: Optional[Path] = typer.Option(None, help="Per-country budgets CSV (country,budget)"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    runs: Optional[int] = typer.Option(None, help="Monte Carlo runs per ensemble [1000]"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Development footprints: chase the final indicators of each country in the cluster above."""
    params = dict(locals())
    with _command("prospective", params, _run_overrides(seed, runs, jobs)) as run:
        data = _load_panel(run, panel, pillars)
        sim_panel = _simulation_panel(run, data)
        if clusters:
            labels = load_clusters(run.input(clusters))
            assignment = ClusterAssignment(labels=labels, k=max(labels.values()))
        else:
            assignment = ward_cluster(sim_panel, run.cfg.analysis.clusters)
        named = _split(followers)
        chosen = named or [c for c in sim_panel.countries if assignment.label_of(c) > 1]
        cfg = run.cfg.run

        edges = []
        summary = {}
        profiles = []
        retro_profiles: dict[str, AllocationProfile] = {}
        for follower in chosen:
            candidates = candidates_above(assignment, follower)
            if not candidates:
                logger.info(f"{follower} is in the top cluster; no footprints")
                continue
            setup = _load_setups(run, data, networks, [follower], gammas, budgets)[0]
            retro, _ = retrospective(setup, cfg.runs, seed=cfg.seed, jobs=cfg.jobs, **run.simulation)
            report = footprints(
                setup,
                retro,
                {y: sim_panel.last_year(y) for y in candidates},
                cfg.runs,
                seed=cfg.seed,
                jobs=cfg.jobs,
                **run.simulation,
            )
            edges.extend(e.model_dump() for e in report.edges)
            profiles.append(retro)
            retro_profiles[follower] = retro
            profiles.extend(report.profiles.values())
            summary[follower] = {
                "cluster": assignment.label_of(follower),
                "most_feasible": report.most_feasible,
                "trivial_target": report.trivial_target,
            }
        w = run.writer
        w.write_csv(
            "footprints.csv",
            pd.DataFrame(edges, columns=["follower", "target", "feasibility", "target_similarity", "top_pillar"]),
        )
        by_issue, by_pillar = _profile_frames(profiles)
        w.write_csv("footprint_profiles.csv", by_issue)
        w.write_csv("footprint_pillars.csv", by_pillar)
        w.write_csv(
            "clusters.csv",
            pd.DataFrame({"country": list(assignment.labels), "cluster": list(assignment.labels.values())}),
        )
        w.write_csv("cluster_pillars.csv", cluster_pillar_table(sim_panel, assignment, retro_profiles))
        available = [c for c in sim_panel.countries if network_path(Path(networks), c).exists()]
        for label, matrix in cluster_adjacency(read_networks(Path(networks), available), assignment).items():
            w.adopt(write_adjacency(SpilloverNetwork(matrix, tuple(sim_panel.indicators)), w.path(f"cluster_networks/{label}.csv")))
        w.write_json("summary.json", summary)


@app.command()
def sensitivity(
    panel: Path = typer.Option(..., help="Normalized panel CSV"),
    networks: Path = typer.Option(..., help="Directory of <country>.csv adjacency files"),
    countries: Optional[str] = typer.Option(None, help="Comma-separated countries (default: all)"),
    variants: str = typer.Option(",".join(PRESETS), help="Comma-separated mechanism presets"),
    gammas: Optional[Path] = typer.Option(None, help="Calibrated γ CSV (country,gamma)"),
    budgets: Optional[Path] = typer.Option(None, help="Per-country budgets CSV (country,budget)"),
    config: Optional[Path] = typer.Option(None, help="TOML run configuration"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    runs: Optional[int] = typer.Option(None, help="Monte Carlo runs per ensemble [1000]"),
    jobs: Optional[int] = typer.Option(None, help="Parallel workers"),
    out: Optional[Path] = typer.Option(None, help="Output directory (default: PPI_OUT_DIR)"),
    strict: bool = typer.Option(False, help="Fail on non-converged runs"),
):
    """Switch off one mechanism at a time and compare against the full model."""
    params = dict(locals())
    with _command("sensitivity", params, _run_overrides(seed, runs, jobs)) as run:
        data = load_panel(run.input(panel))
        setups = _load_setups(run, data, networks, _split(countries), gammas, budgets)
        an = run.cfg.analysis
        report = sensitivity_suite(
            setups,
            _split(variants) or [BASELINE],
            run.cfg.run.runs,
            seed=run.cfg.run.seed,
            jobs=run.cfg.run.jobs,
            **run.simulation,
        )
        w = run.writer
        w.write_csv("point_estimates.csv", report.point_estimates())
        w.write_csv("deltas.csv", report.deltas())
        w.write_csv("correlations.csv", report.correlations())

        bin_rows, test_rows, jaccards = [], [], []
        for v in report.variants:
            try:
                bins = report.strength_bins(v, bins=an.bins, min_count=an.min_bin_count)
            except DomainError as e:
                logger.warning(f"No strength bins for {v}: {e}")
                continue
            bin_rows.extend({"variant": v, **asdict(b)} for b in bins)
            try:
                rho, p = free_riding_test(bins)
            except DomainError:
                rho, p = float("nan"), float("nan")
            test_rows.append({"variant": v, "spearman": rho, "pvalue": p, "bins": len(bins)})
            if v != BASELINE:
                jaccards.append(report.jaccard(v, an.top_k))
        w.write_csv("strength_bins.csv", pd.DataFrame(bin_rows))
        w.write_csv("free_riding.csv", pd.DataFrame(test_rows))
        jac = pd.concat(jaccards, ignore_index=True) if jaccards else pd.DataFrame(columns=["country", "variant", "jaccard"])
        w.write_csv("jaccard.csv", jac)

        summary: dict[str, Any] = {
            "mean_jaccard": {v: float(g["jaccard"].mean()) for v, g in jac.groupby("variant", sort=False)}
        }
        corruption = run.cfg.indicators.corruption
        if corruption and corruption in data.indicators:
            validation = corruption_performance_table(report.ensembles[BASELINE], data, corruption)
            w.write_csv("corruption_performance.csv", validation.table)
            summary["validation"] = validation.summary()
            empirical = dict(zip(validation.table["country"], validation.table["empirical_corruption"]))
            series = []
            for v in report.variants:
                simulated = {c: r.mean_corruption for c, r in report.ensembles[v].items()}
                if set(simulated) != set(empirical):
                    continue
                cum = cumulative_series(empirical, simulated)
                if not series:
                    series.append(PlotSeries("empirical", cum["country"], cum["empirical_cumulative"]))
                series.append(PlotSeries(v, cum["country"], cum["simulated_cumulative"]))
            w.write_series("cumulative_corruption.json", series)
        w.write_json("summary.json", summary)


@app.command()
def replay(
    manifest: Path = typer.Argument(..., help="manifest.json (or the directory holding it)"),
    out: Optional[Path] = typer.Option(None, help="Write into another directory instead of the recorded one"),
):
    """Re-run the command recorded in a manifest."""
    try:
        replay_manifest(manifest, COMMANDS, out)
    except PPIError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1) from None


COMMANDS = {
    "normalize": normalize,
    "estimate-network": estimate_network,
    "simulate": simulate,
    "calibrate": calibrate,
    "retrospective": retrospective_cmd,
    "prospective": prospective,
    "sensitivity": sensitivity,
}


if __name__ == "__main__":
    app()
