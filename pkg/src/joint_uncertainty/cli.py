"""Command-line interface for Joint Uncertainty."""

import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
import numpy as np

from . import __version__
from .config import Command, RunConfig, SolverConfig, XiSearchConfig, load_config
from .errors import NumericalError
from .extrapolation import DEFAULT_ORDER, ConvergenceSeries, fit_series, order_stability
from .gaussian_family import (
    GaussianStateParams,
    cauchy_schwarz_overlap,
    check_minimum_condition,
    closed_form_product,
    numeric_product_oracle,
)
from .gaussian_field import DEFAULT_MODE_CAP, fit_scaling, scan_minimum
from .minimizer import GroundStateResult, UncertaintyProblem, minimize_over_xi
from .number_mixtures import (
    bound_for,
    parse_distribution,
    random_distribution,
    random_subspace_values,
    verify_chain,
)
from .results import ResultsCache, RunArtifacts, cache_key, read_csv

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["n", "m", "xi", "delta_tau2", "delta_omega2", "R"]
DEFAULT_BSV_MEANS = "10,30,100,300,1000"
ORDER_HELP = f"Extrapolation order (default: {DEFAULT_ORDER})"


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATEFMT)
    logging.getLogger().setLevel(level)


def parse_int_list(text: str) -> List[int]:
    """``2-5`` or ``2,3,5`` (or a mix such as ``2-4,8``)."""
    values: List[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            low, high = (int(v) for v in part.split("-", 1))
            if high < low:
                raise ValueError(f"empty range {part!r}")
            values.extend(range(low, high + 1))
        else:
            values.append(int(part))
    if not values:
        raise ValueError(f"no values in {text!r}")
    return sorted(set(values))


def parse_float_list(text: str) -> List[float]:
    values = [float(v) for v in str(text).split(",") if v.strip()]
    if not values:
        raise ValueError(f"no values in {text!r}")
    return values


class _ExitCodeGroup(click.Group):
    """Maps failures onto exit codes: 1 usage, 2 numerical failure."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise
        except NumericalError as e:
            click.echo(f"Numerical failure: {e}", err=True)
            ctx.exit(2)
        except ValueError as e:
            raise click.ClickException(str(e)) from e


def _prepare(ctx: click.Context, command: Command, **flags: Any) -> RunConfig:
    config: RunConfig = ctx.obj
    config.command = command.value
    config.apply_overrides(**flags)
    config.validate()
    return config


def _run(config: RunConfig, body: Callable[[RunArtifacts], Optional[int]]) -> Optional[int]:
    return _run_in(config, Path(config.output_dir) / config.command, body)


def _run_in(
    config: RunConfig, folder: Path, body: Callable[[RunArtifacts], Optional[int]]
) -> Optional[int]:
    """Run ``body`` with an artifact collector; always writes the manifest."""
    artifacts = RunArtifacts(config, folder)
    try:
        return body(artifacts)
    except NumericalError as e:
        artifacts.diagnostic(e)
        raise
    finally:
        artifacts.finish()


# =============================================================================
# Per-cell minimization (shared by min-uncertainty and sweep)
# =============================================================================


def cell_parameters(config: RunConfig, n: int, m: int) -> Dict[str, Any]:
    return {
        "n": n,
        "m": m,
        "time_scale": float(config.parameter("time_scale", 1.0)),
        "seed": config.seed,
        "solver": asdict(config.solver),
        "xi_search": asdict(config.xi_search),
    }


def solve_cell(parameters: Dict[str, Any]) -> Dict[str, Any]:
    """Minimize over xi for one (n, m) cell; returns the JSON detail."""
    n, m = parameters["n"], parameters["m"]
    problem = UncertaintyProblem(
        n, m, parameters["time_scale"], SolverConfig(**parameters["solver"]), parameters["seed"]
    )
    result = minimize_over_xi(
        n,
        m,
        time_scale=parameters["time_scale"],
        search=XiSearchConfig(**parameters["xi_search"]),
        problem=problem,
    )
    fractions = problem.relative_fractions(result)
    return {
        "result": result.to_dict(),
        "fractions": asdict(fractions),
        "eigensolves": problem.eigensolves,
        "lower_bound": result.lower_bound,
    }


def _result_row(result: GroundStateResult) -> Dict[str, Any]:
    return {
        "n": result.n,
        "m": result.m,
        "xi": result.xi,
        "delta_tau2": result.delta_tau2,
        "delta_omega2": result.delta_omega2,
        "R": result.product,
    }


# =============================================================================
# Commands
# =============================================================================


@click.group(cls=_ExitCodeGroup)
@click.version_option(version=__version__)
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Flat YAML config file (flags override it)",
)
@click.option("--verbose", "-v", is_flag=True, default=False, help="Debug logging")
@click.pass_context
def cli(ctx, config_path, verbose):
    """Joint Uncertainty - minimum time-delay / sum-frequency uncertainty products.

    Computes the smallest achievable dtau^2 dOmega^2 for n-photon states in
    truncated Hermite-Gauss mode bases, extrapolates to the infinite basis,
    and evaluates the Gaussian-family, photon-number mixture and squeezed
    vacuum results.

    Exit codes:
      0: success
      1: usage error
      2: numerical failure (diagnostic.json written)
      3: verification failure
    """
    _setup_logging(verbose)
    ctx.obj = load_config(config_path)


@cli.command("min-uncertainty")
@click.option("--photons", "-n", type=int, default=None, help="Photon number n (>= 2)")
@click.option("--modes", "-m", type=int, default=None, help="Hermite-Gauss modes m (>= 2)")
@click.option("--time-scale", type=float, default=None, help="Mode time scale (default: 1)")
@click.option("--seed", type=int, default=None, help="Random seed")
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.option("--no-cache", is_flag=True, default=False, help="Ignore the results cache")
@click.pass_context
def min_uncertainty(ctx, photons, modes, time_scale, seed, output, no_cache):
    """Global minimum of dtau^2 dOmega^2 for n photons in m modes."""
    config = _prepare(
        ctx,
        Command.MIN_UNCERTAINTY,
        photons=photons,
        modes=modes,
        time_scale=time_scale,
        seed=seed,
        output=output,
        use_cache=False if no_cache else None,
    )
    n, m = config.parameter("photons"), config.parameter("modes")
    if n is None or m is None:
        raise click.UsageError("--photons and --modes are required")
    n, m = int(n), int(m)
    if n < 2:
        raise ValueError(f"photon number must be >= 2, got {n}")
    if m < 2:
        raise ValueError(f"mode count must be >= 2, got {m}")

    def body(artifacts: RunArtifacts) -> None:
        cache = ResultsCache(config.cache_dir, config.use_cache)
        parameters = cell_parameters(config, n, m)
        key = cache_key(Command.MIN_UNCERTAINTY.value, parameters)
        detail = cache.get(key)
        if detail is None:
            detail = solve_cell(parameters)
            cache.put(key, detail)
        else:
            logger.info(f"n={n}, m={m}: cache hit")
        result = GroundStateResult.from_dict(detail["result"])
        artifacts.csv(f"min_uncertainty_n{n}_m{m}.csv", RESULT_COLUMNS, [_result_row(result)])
        artifacts.json(f"min_uncertainty_n{n}_m{m}.json", detail)
        click.echo(
            f"n={n} m={m}: R={result.product:.12g} at xi={result.xi:.6f} "
            f"(dtau2={result.delta_tau2:.6g}, dOmega2={result.delta_omega2:.6g})"
        )

    _run(config, body)


def _run_cells(
    cells: List[Dict[str, Any]], workers: int
) -> Dict[int, Dict[str, Any]]:
    """Solve cells in a process pool; failures come back as {'error': ...}."""
    outcomes: Dict[int, Dict[str, Any]] = {}
    if workers <= 1:
        for i, cell in enumerate(cells):
            try:
                outcomes[i] = solve_cell(cell)
            except (NumericalError, ValueError) as e:
                logger.error(f"cell n={cell['n']}, m={cell['m']} failed: {e}")
                outcomes[i] = {"error": f"{type(e).__name__}: {e}"}
        return outcomes

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(solve_cell, cell): i for i, cell in enumerate(cells)}
        for future in as_completed(futures):
            i = futures[future]
            try:
                outcomes[i] = future.result()
            except (NumericalError, ValueError) as e:
                logger.error(f"cell n={cells[i]['n']}, m={cells[i]['m']} failed: {e}")
                outcomes[i] = {"error": f"{type(e).__name__}: {e}"}
    return outcomes


def _fit_summary(series: ConvergenceSeries, order: int) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "points": len(series.points),
        "monotonicity_violations": [list(p) for p in series.monotonicity_violations()],
        "lower_bound": 1.0 - 2.0 / series.n,
    }
    usable = min(order, len(series.points) - 2)
    if usable < 1:
        summary["error"] = "not enough points to extrapolate"
        return summary
    if usable < order:
        logger.warning(f"n={series.n}: only {len(series.points)} points, fitting order {usable}")
    fit = fit_series(series, usable)
    summary.update(fit.to_dict())
    summary["order_stability"] = order_stability(series, usable) if usable >= 2 else None
    return summary


@cli.command()
@click.option("--photons", "-n", "photon_range", default=None, help="Photon numbers, e.g. 2-5")
@click.option("--modes", "-m", "mode_range", default=None, help="Mode counts, e.g. 2-15")
@click.option("--time-scale", type=float, default=None)
@click.option("--order", type=int, default=None, help=ORDER_HELP)
@click.option("--workers", "-w", type=int, default=None, help="Worker processes")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.option("--no-cache", is_flag=True, default=False)
@click.pass_context
def sweep(ctx, photon_range, mode_range, time_scale, order, workers, seed, output, no_cache):
    """Convergence sweep over (n, m) followed by extrapolation per n."""
    config = _prepare(
        ctx,
        Command.SWEEP,
        photon_range=photon_range,
        mode_range=mode_range,
        time_scale=time_scale,
        order=order,
        workers=workers,
        seed=seed,
        output=output,
        use_cache=False if no_cache else None,
    )
    photon_numbers = parse_int_list(config.parameter("photon_range", "2-5"))
    mode_counts = parse_int_list(config.parameter("mode_range", "2-15"))
    if photon_numbers[0] < 2 or mode_counts[0] < 2:
        raise ValueError("photon numbers and mode counts must be >= 2")
    fit_order = int(config.parameter("order", DEFAULT_ORDER))

    def body(artifacts: RunArtifacts) -> int:
        cache = ResultsCache(config.cache_dir, config.use_cache)
        grid = [(n, m) for n in photon_numbers for m in mode_counts]
        details: Dict[tuple, Dict[str, Any]] = {}
        pending: List[Dict[str, Any]] = []
        for n, m in grid:
            parameters = cell_parameters(config, n, m)
            cached = cache.get(cache_key(Command.MIN_UNCERTAINTY.value, parameters))
            if cached is not None:
                details[(n, m)] = cached
            else:
                pending.append(parameters)
        logger.info(f"sweep: {len(grid)} cells, {len(details)} cached, {len(pending)} to solve")

        outcomes = _run_cells(pending, config.thread_count)
        eigensolves = 0
        for i, parameters in enumerate(pending):
            outcome = outcomes[i]
            if "error" not in outcome:
                cache.put(cache_key(Command.MIN_UNCERTAINTY.value, parameters), outcome)
                eigensolves += outcome.get("eigensolves", 0)
            details[(parameters["n"], parameters["m"])] = outcome

        rows = []
        failed = 0
        for n, m in grid:
            detail = details[(n, m)]
            if "error" in detail:
                failed += 1
                rows.append({"n": n, "m": m, "status": detail["error"]})
                continue
            result = GroundStateResult.from_dict(detail["result"])
            rows.append({**_result_row(result), "status": "ok"})
        artifacts.csv("sweep.csv", RESULT_COLUMNS + ["status"], rows)

        summary: Dict[str, Any] = {
            "cells": len(grid),
            "cached_cells": len(grid) - len(pending),
            "failed_cells": failed,
            "eigensolves": eigensolves,
            "series": {},
        }
        for n in photon_numbers:
            good = [r for r in rows if r["n"] == n and r["status"] == "ok"]
            artifacts.csv(f"sweep_n{n}.csv", RESULT_COLUMNS, good)
            if not good:
                continue
            series = ConvergenceSeries.from_pairs(n, [(r["m"], r["R"]) for r in good])
            summary["series"][str(n)] = _fit_summary(series, fit_order)
            fit = summary["series"][str(n)]
            if "r_inf" in fit:
                click.echo(f"n={n}: R_inf={fit['r_inf']:.6f} (1 - 2/n = {1 - 2 / n:.6f})")
        artifacts.json("sweep_summary.json", summary)

        click.echo(f"{len(grid)} cells, {summary['cached_cells']} from cache, {failed} failed")
        return 2 if failed else 0

    code = _run(config, body)
    if code:
        ctx.exit(code)


@cli.command()
@click.option(
    "--input",
    "-i",
    "input_path",
    type=click.Path(path_type=Path, exists=True, dir_okay=False),
    required=True,
    help="Sweep CSV with n, m, R columns",
)
@click.option("--order", type=int, default=None, help=ORDER_HELP)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.pass_context
def extrapolate(ctx, input_path, order, output):
    """Fit R(m) = R_inf + sum_k a_k m^-k for each photon number in a sweep CSV."""
    config = _prepare(ctx, Command.EXTRAPOLATE, input=str(input_path), order=order, output=output)
    fit_order = int(config.parameter("order", DEFAULT_ORDER))

    by_n: Dict[int, List[tuple]] = {}
    for row in read_csv(input_path):
        if row.get("status", "ok") != "ok":
            continue
        by_n.setdefault(int(row["n"]), []).append((int(row["m"]), float(row["R"])))
    if not by_n:
        raise ValueError(f"{input_path}: no usable rows")

    def body(artifacts: RunArtifacts) -> None:
        fits = {}
        rows = []
        for n in sorted(by_n):
            series = ConvergenceSeries.from_pairs(n, sorted(by_n[n]))
            fit = fit_series(series, fit_order)
            fits[str(n)] = {**fit.to_dict(), "order_stability": order_stability(series, fit_order)}
            rows.append(fit.to_dict())
            click.echo(f"n={n}: R_inf={fit.r_inf:.6f} (1 - 2/n = {fit.lower_bound:.6f})")
        columns = ["n", "order", "r_inf", "lower_bound", "rms_residual", "condition_number",
                   "point_count"]
        artifacts.csv("extrapolation.csv", columns, rows)
        artifacts.json("extrapolation.json", fits)

    _run(config, body)


@cli.command()
@click.option("--photons", "-n", "photon_list", default=None, help="Photon numbers (default: 2,3)")
@click.option("--ratios", default=None, help="gamma/delta values (default: 0.1,0.3,1,2)")
@click.option("--nodes", type=int, default=None, help="Gauss-Hermite nodes per axis (default: 64)")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.pass_context
def gaussian(ctx, photon_list, ratios, nodes, seed, output):
    """Closed-form Gaussian-family products against the quadrature oracle."""
    config = _prepare(
        ctx, Command.GAUSSIAN, photon_list=photon_list, ratios=ratios, nodes=nodes, seed=seed,
        output=output,
    )
    photon_numbers = parse_int_list(config.parameter("photon_list", "2,3"))
    ratio_values = parse_float_list(config.parameter("ratios", "0.1,0.3,1,2"))
    node_count = int(config.parameter("nodes", 64))

    def body(artifacts: RunArtifacts) -> None:
        rows = []
        for n in photon_numbers:
            for ratio in ratio_values:
                params = GaussianStateParams(n, ratio, 1.0)
                row: Dict[str, Any] = {
                    "n": n,
                    "gamma_over_delta": ratio,
                    "closed_form": closed_form_product(params),
                }
                if n in (2, 3) and ratio > 0:
                    delta_tau2, delta_omega2 = numeric_product_oracle(params, node_count)
                    row["oracle"] = delta_tau2 * delta_omega2
                    row["abs_error"] = abs(row["oracle"] - row["closed_form"])
                    row["cauchy_schwarz_overlap"] = cauchy_schwarz_overlap(params, node_count)
                rows.append(row)
                click.echo(f"n={n} gamma/delta={ratio:g}: R={row['closed_form']:.12g}")
        artifacts.csv(
            "gaussian.csv",
            ["n", "gamma_over_delta", "closed_form", "oracle", "abs_error",
             "cauchy_schwarz_overlap"],
            rows,
        )

        rng = np.random.default_rng(config.seed)
        condition_rows = []
        for n in photon_numbers:
            points = rng.normal(size=(100, n))
            condition_rows.append(
                {
                    "n": n,
                    "gamma_zero_residual": check_minimum_condition(
                        GaussianStateParams(n, 0.0, 1.0), points
                    ),
                    "separable_residual": check_minimum_condition(
                        GaussianStateParams(n, 1.0, 1.0), points
                    ),
                }
            )
        artifacts.csv(
            "gaussian_minimum_condition.csv",
            ["n", "gamma_zero_residual", "separable_residual"],
            condition_rows,
        )

    _run(config, body)


@cli.command("mixture-bound")
@click.option(
    "--distribution",
    "-d",
    "distributions",
    multiple=True,
    help="poisson:<mean>, thermal:<mean>, bsv:<mean> or file:<path> (repeatable)",
)
@click.option("--random", "random_count", type=int, default=None,
              help="Also check the bound chain on N random distributions")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.pass_context
def mixture_bound(ctx, distributions, random_count, seed, output):
    """Lower bounds on dtau dOmega for photon-number mixtures."""
    config = _prepare(
        ctx,
        Command.MIXTURE_BOUND,
        distributions=list(distributions) or None,
        random_count=random_count,
        seed=seed,
        output=output,
    )
    specs = config.parameter("distributions") or []
    if isinstance(specs, str):
        specs = [specs]
    samples = int(config.parameter("random_count", 0))
    if not specs and not samples:
        raise click.UsageError("give at least one --distribution or --random N")
    parsed = [parse_distribution(spec) for spec in specs]

    def body(artifacts: RunArtifacts) -> None:
        if parsed:
            rows = []
            for spec, dist in zip(specs, parsed):
                rows.append({"distribution": spec, **bound_for(dist)})
                click.echo(f"{spec}: bound={rows[-1]['general_bound']:.12g}")
            artifacts.csv(
                "mixture_bound.csv",
                ["distribution", "mean", "pair_mean", "p0", "p1", "p2", "general_bound",
                 "degenerate", "simplified_bound", "final_bound"],
                rows,
            )
        if samples:
            rng = np.random.default_rng(config.seed)
            failures = []
            for i in range(samples):
                dist = random_distribution(rng)
                report = verify_chain(dist, *random_subspace_values(dist, rng))
                if not report.passed:
                    failures.append({"sample": i, "links": report.failed_links()})
            artifacts.json("mixture_chain.json", {"samples": samples, "failures": failures})
            click.echo(f"chain check: {samples - len(failures)}/{samples} passed")

    _run(config, body)


def _scan_target(arguments: tuple) -> Dict[str, Any]:
    target, mode_cap = arguments
    return scan_minimum(target, mode_cap=mode_cap).to_dict()


@cli.command("bsv-scan")
@click.option("--mean-n", "mean_values", default=None,
              help=f"Target mean photon numbers (default: {DEFAULT_BSV_MEANS})")
@click.option("--mode-cap", type=int, default=None,
              help=f"Schmidt mode cap (default: {DEFAULT_MODE_CAP})")
@click.option("--workers", "-w", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.pass_context
def bsv_scan(ctx, mean_values, mode_cap, workers, output):
    """Minimum product of multimode squeezed vacuum versus mean photon number."""
    config = _prepare(
        ctx, Command.BSV_SCAN, mean_values=mean_values, mode_cap=mode_cap, workers=workers,
        output=output,
    )
    targets = parse_float_list(config.parameter("mean_values", DEFAULT_BSV_MEANS))
    cap = int(config.parameter("mode_cap", DEFAULT_MODE_CAP))
    if min(targets) <= 0:
        raise ValueError("mean photon numbers must be positive")

    def body(artifacts: RunArtifacts) -> None:
        jobs = [(t, cap) for t in targets]
        if config.thread_count > 1:
            with ProcessPoolExecutor(max_workers=config.thread_count) as pool:
                rows = list(pool.map(_scan_target, jobs))
        else:
            rows = [_scan_target(job) for job in jobs]
        for row in rows:
            row["mixture_bound"] = 1.0 - 2.0 / row["mean_n"] if row["mean_n"] >= 2 else None
            if row["mixture_bound"] is not None and row["product"] < row["mixture_bound"] - 1e-9:
                logger.warning(f"<n>={row['mean_n']:g}: R_min below 1 - 2/<n>")
            click.echo(f"<n>={row['mean_n']:g}: R_min={row['product']:.12g} at mu={row['mu']:.4f}")
        artifacts.csv(
            "bsv_scan.csv",
            ["mean_n", "mu", "gain", "product", "mixture_bound", "mode_count", "evaluations"],
            rows,
        )
        try:
            fit = fit_scaling([(row["mean_n"], row["product"]) for row in rows])
        except ValueError as e:
            logger.warning(f"scaling fit skipped: {e}")
            return
        artifacts.json("bsv_fit.json", {**fit.to_dict(), "reference_c": 0.18})
        click.echo(f"fit: k={fit.k:.4f}, c={fit.c:.4f}")

    _run(config, body)


@cli.command()
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.option("--perturb-t2", type=float, default=0.0, hidden=True)
@click.pass_context
def verify(ctx, seed, output, perturb_t2):
    """Run the invariant suite; exits 3 if any check fails."""
    from .verify import run_verify

    config = _prepare(ctx, Command.VERIFY, seed=seed, output=output)

    def body(artifacts: RunArtifacts) -> int:
        report = run_verify(seed=config.seed, perturb_t2=perturb_t2)
        artifacts.json("verify.json", report.to_dict())
        for check in report.checks:
            mark = "PASS" if check.passed else "FAIL"
            click.echo(f"  [{mark}] {check.name}: {check.value:.3e} (<= {check.threshold:.1e})")
        click.echo(f"{len(report.checks) - len(report.failures())}/{len(report.checks)} passed")
        return 0 if report.passed else 3

    code = _run(config, body)
    if code:
        ctx.exit(code)


@cli.command()
@click.option(
    "--input-dir",
    "-i",
    type=click.Path(path_type=Path, file_okay=False),
    default=None,
    help="Directory holding sweep/ and bsv-scan/ results (default: output dir)",
)
@click.pass_context
def plot(ctx, input_dir):
    """Render SVG charts from sweep and BSV-scan results."""
    from . import plotting

    config: RunConfig = ctx.obj
    config.command = "plot"
    base = Path(input_dir or config.output_dir)
    sweep_csv = base / Command.SWEEP.value / "sweep.csv"
    scan_csv = base / Command.BSV_SCAN.value / "bsv_scan.csv"
    if not sweep_csv.exists() and not scan_csv.exists():
        raise click.ClickException(f"no sweep.csv or bsv_scan.csv under {base}")

    def body(artifacts: RunArtifacts) -> None:
        folder = artifacts.output_dir
        if sweep_csv.exists():
            rows = read_csv(sweep_csv)
            artifacts.record(plotting.plot_convergence(rows, folder / "convergence.svg"))
        if scan_csv.exists():
            fit_path = scan_csv.parent / "bsv_fit.json"
            fit = json.loads(fit_path.read_text()) if fit_path.exists() else None
            artifacts.record(
                plotting.plot_bsv_scaling(read_csv(scan_csv), folder / "bsv_scaling.svg", fit)
            )
        for name in artifacts.outputs:
            click.echo(f"Created: {folder / name}")

    try:
        _run_in(config, base / "plot", body)
    except ImportError as e:
        raise click.ClickException(str(e)) from e


@cli.command()
@click.option(
    "--output",
    "-o",
    type=click.Path(path_type=Path),
    default=Path("config"),
    help="Output directory for config files",
)
def init(output):
    """Generate a sample configuration file.

    Creates config.yaml with the default solver, xi-search and output
    settings.
    """
    output.mkdir(parents=True, exist_ok=True)

    cfg = RunConfig.default()
    config_path = output / "config.yaml"
    cfg.to_yaml(config_path)

    click.echo(f"Created: {config_path}")
    click.echo()
    click.echo("Edit the config file to customize:")
    click.echo("  - Eigensolver tolerance and Krylov size")
    click.echo("  - xi grid and refinement tolerance")
    click.echo("  - Output, cache and worker settings")
    click.echo()
    click.echo(f"Run with: joint-uncertainty --config {config_path} sweep")


@cli.command()
@click.pass_context
def status(ctx):
    """Show version, cache and default settings."""
    config: RunConfig = ctx.obj
    cache = ResultsCache(config.cache_dir)
    entries = cache.entries()

    click.echo(f"Joint Uncertainty {__version__}")
    click.echo("=" * 40)
    click.echo()
    click.echo(f"Cache directory: {config.cache_dir}")
    click.echo(f"  Entries: {len(entries)}")
    click.echo(f"  Size: {cache.size_bytes() / 1024:.1f} KiB")
    click.echo()
    click.echo(f"Output directory: {config.output_dir}")
    click.echo(f"Workers: {config.thread_count}")
    click.echo(f"Seed: {config.seed}")
    click.echo()
    click.echo("Solver:")
    for key, value in asdict(config.solver).items():
        click.echo(f"  {key}: {value}")
    click.echo("xi search:")
    for key, value in asdict(config.xi_search).items():
        click.echo(f"  {key}: {value}")


def main() -> None:
    cli(prog_name="joint-uncertainty")


if __name__ == "__main__":
    main()
