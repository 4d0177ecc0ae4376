"""
Main CLI interface for spectrafrac
"""

import logging
import shlex
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import click
import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from .core.acceptance import CHECK_NAMES, run_acceptance
from .core.experiments import EXPERIMENT_KINDS, default_config_path, parse_experiment, run_experiment
from .core.history import RunHistory, write_manifest
from .core.validator import ConfigValidator
from .dims.kernels import DEFAULT_RATIO, scaling_profile
from .dims.local_dims import classify_mass, decompose, measure_dims
from .dims.measures import DiscreteMeasure, RestrictionSet, arcsine_cdf, arcsine_density, cantor_measure, uniform_measure
from .dims.set_dims import SetRep, box_dimension, cantor_set, dimension_scan, transition_alpha
from .exceptions import DomainError, SpectraFracError
from .operators.potentials import build_truncation, parse_potential
from .operators.spectral import (
    SpectralRequest,
    cyclic_coverage,
    green_density,
    resolvent_convergence_scan,
    spectral_measure,
    spectrum_support,
)
from .utils.config import Config
from .utils.helpers import resolve_jobs, resolve_output_dir
from .utils.io import write_csv, write_json
from .utils.ui import SpectraUI

app = typer.Typer(
    name="spectrafrac",
    help="Finite-scale fractal dimensions of measures, sets and Schrodinger spectral measures",
    add_completion=False,
)

ui = SpectraUI()
logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2

SEED_OPTION = typer.Option(None, "--seed", help="Seed for every stochastic step (default: config / SPECTRAFRAC_SEED)")
JOBS_OPTION = typer.Option(None, "--jobs", "-j", help="Worker threads (default: available cores)")
OUTPUT_OPTION = typer.Option(None, "--output-dir", "-o", help="Directory for CSV/JSON outputs and the manifest")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Log progress at INFO level")


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def load_config() -> Config:
    try:
        return Config.load()
    except SpectraFracError as e:
        ui.error(str(e))
        sys.exit(EXIT_USAGE)


class RunContext:
    """Resolved settings of one CLI run plus what it has written so far"""
    def __init__(self, command: str, seed: Optional[int], jobs: Optional[int], output_dir: Optional[Path], verbose: bool):
        self.command = command
        self.config = load_config()
        self.verbose = verbose or self.config.verbose
        setup_logging(self.verbose)
        ui.console.no_color = not self.config.use_colors
        self.seed = self.config.seed if seed is None else seed
        self.jobs = resolve_jobs(self.config.jobs if jobs is None else jobs)
        self.output_dir = resolve_output_dir(output_dir, self.config.output_dir, command)
        self.parameters: Dict[str, Any] = {}
        self.outputs: List[Path] = []
        self.labels: List[str] = []
        self.success = True
        self.start_time = time.perf_counter()

    def add_outputs(self, *paths: Path):
        self.outputs.extend(Path(p) for p in paths)

    def finish(self, success: bool):
        elapsed = time.perf_counter() - self.start_time
        manifest = write_manifest(
            self.output_dir,
            command=self.command,
            parameters={"seed": self.seed, "jobs": self.jobs, **self.parameters},
            timings={"total": elapsed},
            outputs=[p.name for p in self.outputs],
            success=success,
            labels=self.labels,
        )
        RunHistory(self.config).add_entry(
            command=self.command,
            arguments=shlex.join(sys.argv[1:]),
            success=success,
            execution_time=elapsed,
            output_dir=str(self.output_dir),
            seed=self.seed,
        )
        if success:
            ui.show_outputs([str(p) for p in [*self.outputs, manifest]])


@contextmanager
def run_context(
    command: str,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    output_dir: Optional[Path] = None,
    verbose: bool = False,
) -> Iterator[RunContext]:
    """Set up a run, then map library errors to exit codes: 2 for usage/config, 1 otherwise."""
    ctx = RunContext(command, seed, jobs, output_dir, verbose)
    try:
        yield ctx
    except (SpectraFracError, ValidationError) as e:
        ctx.finish(success=False)
        if ctx.verbose:
            logger.exception(f"{command} failed")
        ui.error(str(e))
        usage = isinstance(e, (DomainError, ValidationError))
        sys.exit(EXIT_USAGE if usage else EXIT_FAILED)
    ctx.finish(success=ctx.success)


def parse_interval(text: str) -> Tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"expected an interval as 'a,b', got {text!r}")
    return a, b


def load_measure(path: Path) -> DiscreteMeasure:
    if not path.exists():
        raise DomainError(f"measure file not found: {path}")
    return DiscreteMeasure.load(path)


@app.command("measure-dim")
def measure_dim(
    measure: Path = typer.Argument(..., help="Measure file (.csv position,weight rows or .json)"),
    n_sample: Optional[int] = typer.Option(None, "--n-sample", help="Points drawn from the measure"),
    quantile: Optional[float] = typer.Option(None, "--quantile", help="Quantile level in (0.5, 1)"),
    eps_min: Optional[float] = typer.Option(None, "--eps-min", help="Smallest ball radius"),
    eps_max: Optional[float] = typer.Option(None, "--eps-max", help="Largest ball radius"),
    n_scales: Optional[int] = typer.Option(None, "--n-scales", help="Radii in the geometric window"),
    region: Optional[List[str]] = typer.Option(None, "--region", help="Sample only from 'a,b' (repeatable)"),
    seed: Optional[int] = SEED_OPTION,
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Estimate the upper Hausdorff and lower packing dimensions of a measure."""
    with run_context("measure-dim", seed, None, output_dir, verbose) as ctx:
        cfg = ctx.config
        mu = load_measure(measure)
        restriction = RestrictionSet.of(*[parse_interval(r) for r in region]) if region else None
        with ui.status("Estimating local dimensions..."):
            report = measure_dims(
                mu,
                n_sample=n_sample or cfg.n_sample,
                quantile=quantile or cfg.quantile,
                eps_min=eps_min or cfg.eps_min,
                eps_max=eps_max or cfg.eps_max,
                n_scales=n_scales or cfg.n_scales,
                seed=ctx.seed,
                region=restriction,
            )
        ctx.parameters.update({"measure": str(measure), **report.to_dict()})
        ctx.add_outputs(
            write_json(ctx.output_dir / "measure_dims.json", {"measure": str(measure), **report.to_dict()}),
            report.save_points_csv(ctx.output_dir / "points.csv"),
        )
        ui.show_report("Measure dimensions", report.to_dict())


@app.command("set-dim")
def set_dim(
    set_file: Path = typer.Argument(..., help="Set file written by `oracle cantor-set` or SetRep.save_json"),
    delta: float = typer.Option(3.0 ** -8, "--delta", help="Cover / packing scale"),
    box_scales: int = typer.Option(5, "--box-scales", help="Box-counting scales delta * 3**j"),
    alpha_step: float = typer.Option(0.01, "--alpha-step", help="Spacing of the alpha scan"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Covering, packing and box-counting dimensions of a finite set representation."""
    with run_context("set-dim", None, None, output_dir, verbose) as ctx:
        if not set_file.exists():
            raise DomainError(f"set file not found: {set_file}")
        S = SetRep.load(set_file)
        alphas = np.round(np.arange(0.0, 1.0 + alpha_step / 2, alpha_step), 6)
        hausdorff = dimension_scan(S, alphas, delta, "hausdorff")
        packing = dimension_scan(S, alphas, delta, "packing")
        summary = {
            "set": str(set_file),
            "delta": delta,
            "dim_H_transition": transition_alpha(hausdorff),
            "dim_P_transition": transition_alpha(packing),
            "box_dimension": box_dimension(S, delta * 3.0 ** np.arange(box_scales)),
        }
        ctx.parameters.update(summary)
        ctx.add_outputs(
            write_json(ctx.output_dir / "set_dims.json", summary),
            hausdorff.save_csv(ctx.output_dir / "hausdorff_scan.csv"),
            packing.save_csv(ctx.output_dir / "packing_scan.csv"),
        )
        ui.show_report("Set dimensions", summary)


@app.command()
def spectral(
    spec_file: Path = typer.Argument(..., help="Potential spec (JSON with a 'variant' field)"),
    n: int = typer.Option(2001, "--n", help="Truncation size"),
    psi: str = typer.Option("delta0", "--psi", help="delta0 or delta1"),
    eta: Optional[float] = typer.Option(None, "--eta", help="Also write the smoothed Green density at this eta"),
    green_points: int = typer.Option(401, "--green-points", help="Energies in the Green density grid"),
    sizes: Optional[str] = typer.Option(None, "--sizes", help="Comma-separated sizes for a convergence scan"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Spectral measure of a truncated Schrodinger operator."""
    with run_context("spectral", None, None, output_dir, verbose) as ctx:
        spec = ConfigValidator(ctx.config).load(spec_file, parse_potential)
        request = SpectralRequest(spec=spec, N=n, psi=psi)
        with ui.status(f"Diagonalizing N={n}..."):
            result = spectral_measure(request)
        low, high = spectrum_support(spec, n)
        summary = {**result.metadata(), "spectrum_low": low, "spectrum_high": high}
        summary["cyclic_coverage"] = cyclic_coverage(spec, n) if n >= 3 else None
        ctx.parameters.update({"spec": str(spec_file), **summary})
        ctx.add_outputs(*result.save(ctx.output_dir / "spectral"))
        ctx.add_outputs(build_truncation(spec, n).save_csv(ctx.output_dir / "potential.csv"))
        if eta is not None:
            xs = np.linspace(low - 0.5, high + 0.5, green_points)
            density = green_density(spec, n, xs, eta)
            ctx.add_outputs(write_csv(ctx.output_dir / "green.csv", ["x", "density"], np.column_stack([xs, density]), {"eta": eta, "N": n}))
        if sizes:
            scan = resolvent_convergence_scan(spec, [int(s) for s in sizes.split(",")], psi)
            ctx.add_outputs(write_csv(ctx.output_dir / "convergence.csv", ["N", "levy_to_largest"], scan, {"psi": psi}))
        ui.show_report("Spectral measure", summary)


@app.command()
def profile(
    measure: Path = typer.Argument(..., help="Measure file"),
    x: float = typer.Option(..., "--x", help="Point at which to profile"),
    alpha: float = typer.Option(..., "--alpha", help="Exponent in [0, 1]"),
    s: float = typer.Option(1.0, "--s", help="Smallest t on the grid"),
    t_max: float = typer.Option(1e4, "--t-max", help="Largest t on the grid"),
    ratio: float = typer.Option(DEFAULT_RATIO, "--ratio", help="Geometric grid ratio"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Tent-kernel scaling profile t -> t^alpha V_t at one point."""
    with run_context("profile", None, None, output_dir, verbose) as ctx:
        result = scaling_profile(load_measure(measure), alpha, x, s, t_max, ratio)
        ctx.parameters.update({"measure": str(measure), "ratio": ratio, **result.to_dict()})
        ctx.add_outputs(result.save_csv(ctx.output_dir / "profile.csv"))
        ui.show_report("Scaling profile", result.to_dict())


@app.command()
def classify(
    measure: Path = typer.Argument(..., help="Measure file"),
    alpha: float = typer.Option(..., "--alpha", help="Exponent in [0, 1]"),
    r: float = typer.Option(..., "--r", help="Threshold on gamma"),
    s: float = typer.Option(1.0, "--s", help="Horizon start"),
    t_max: float = typer.Option(1e4, "--t-max", help="Horizon end"),
    kind: str = typer.Option("H", "--kind", help="H (sup functional) or P (inf functional)"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Split a measure's mass into alpha-continuous and alpha-singular parts."""
    with run_context("classify", None, None, output_dir, verbose) as ctx:
        report = classify_mass(load_measure(measure), alpha, r, s, t_max, kind=kind)
        ctx.parameters.update({"measure": str(measure), **report.to_dict()})
        ctx.add_outputs(write_json(ctx.output_dir / "classification.json", report.to_dict()))
        ui.show_report("Classification", report.to_dict())


@app.command("decompose")
def decompose_command(
    measure: Path = typer.Argument(..., help="Measure file"),
    r: float = typer.Option(..., "--r", help="Threshold on gamma"),
    s: float = typer.Option(1.0, "--s", help="Horizon start"),
    t_max: float = typer.Option(1e4, "--t-max", help="Horizon end"),
    kind: str = typer.Option("H", "--kind", help="H or P"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Zero- and one-dimensional parts of a measure over the alpha grid 1/k, 1-1/k."""
    with run_context("decompose", None, None, output_dir, verbose) as ctx:
        report = decompose(load_measure(measure), r, s, t_max, kind=kind)
        ctx.parameters.update({"measure": str(measure), **report.to_dict()})
        ctx.add_outputs(write_json(ctx.output_dir / "decomposition.json", report.to_dict()))
        ui.show_report("Decomposition", report.to_dict())


@app.command()
def experiment(
    name: str = typer.Argument(..., help="wonderland, limit-periodic or alpha-sweep"),
    config_file: Optional[Path] = typer.Argument(None, help="Experiment config (default: the bundled one)"),
    seed: Optional[int] = SEED_OPTION,
    jobs: Optional[int] = JOBS_OPTION,
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Run an experiment recipe and write its table plus manifest."""
    with run_context(f"experiment-{name}", seed, jobs, output_dir, verbose) as ctx:
        bundled = default_config_path(name)
        path = config_file or bundled

        def parse(data: Dict[str, Any]):
            if data.get("kind") in ("wonderland", "limit_periodic"):
                if seed is not None or "seed" not in data:
                    data = {**data, "seed": ctx.seed}
            return parse_experiment(data)

        cfg = ConfigValidator(ctx.config).load(path, parse)
        if cfg.kind != EXPERIMENT_KINDS[name]:
            raise DomainError(f"{path} holds a {cfg.kind!r} config, not {name!r}")
        if output_dir is None and cfg.output_dir:
            ctx.output_dir = resolve_output_dir(Path(cfg.output_dir), ctx.config.output_dir, name)
        with ui.status(f"Running {name}..."):
            table, paths = run_experiment(cfg, ctx.output_dir, ctx.jobs)
        ctx.parameters.update({"config": str(path), **cfg.model_dump(mode="json")})
        ctx.labels = table.labels
        ctx.add_outputs(paths[0])
        ui.show_table(name, table.columns, table.rows.tolist())
        for label in table.labels:
            ui.warning(label)


@app.command()
def validate(
    only: Optional[List[str]] = typer.Option(None, "--only", help=f"Run only these checks: {', '.join(CHECK_NAMES)}"),
    skip_slow: bool = typer.Option(False, "--skip-slow", help="Skip the slow checks"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="Only validate this experiment config"),
    seed: Optional[int] = SEED_OPTION,
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Run the acceptance suite (or check an experiment config)."""
    with run_context("validate", seed, None, output_dir, verbose) as ctx:
        if config_file is not None:
            result = ConfigValidator(ctx.config).validate(config_file, parse_experiment)
            ctx.parameters["config"] = str(config_file)
            if not result.is_valid:
                raise DomainError(result.reason or "invalid config")
            ui.success(f"{config_file} is a valid experiment config")
            return
        checks = run_acceptance(seed=ctx.seed, only=only, skip_slow=skip_slow, progress=lambda n: ui.info(f"Running {n}..."))
        records = [c.to_dict() for c in checks]
        ctx.parameters.update({"only": only or [], "skip_slow": skip_slow})
        ctx.add_outputs(write_json(ctx.output_dir / "acceptance.json", {"checks": records}))
        ui.show_checks(records)
        failed = [c.name for c in checks if not c.passed]
        ctx.success = not failed
    if failed:
        ui.error(f"Failed checks: {', '.join(failed)}")
        sys.exit(EXIT_FAILED)
    ui.success("All acceptance checks passed")


@app.command()
def oracle(
    name: str = typer.Argument(..., help="cantor-measure, cantor-set, arcsine-cdf or uniform-measure"),
    depth: int = typer.Option(8, "--depth", help="Cantor construction depth"),
    n_atoms: int = typer.Option(1000, "--n-atoms", help="Atoms of the uniform measure"),
    interval: str = typer.Option("0,1", "--interval", help="Interval 'a,b' of the uniform measure"),
    points: int = typer.Option(401, "--points", help="Grid points of the arcsine table"),
    output_dir: Optional[Path] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Write an analytic oracle artifact."""
    with run_context("oracle", None, None, output_dir, verbose) as ctx:
        ctx.parameters.update({"oracle": name, "depth": depth, "n_atoms": n_atoms, "interval": interval, "points": points})
        if name == "cantor-measure":
            ctx.add_outputs(cantor_measure(depth).save_csv(ctx.output_dir / "cantor_measure.csv"))
        elif name == "cantor-set":
            ctx.add_outputs(cantor_set(depth).save_json(ctx.output_dir / "cantor_set.json"))
        elif name == "uniform-measure":
            mu = uniform_measure(parse_interval(interval), n_atoms)
            ctx.add_outputs(mu.save_csv(ctx.output_dir / "uniform_measure.csv"))
        elif name == "arcsine-cdf":
            xs = np.linspace(-2.0, 2.0, points + 2)[1:-1]
            table = np.column_stack([xs, arcsine_cdf(xs), arcsine_density(xs)])
            ctx.add_outputs(write_csv(ctx.output_dir / "arcsine.csv", ["x", "cdf", "density"], table, {"support": "[-2, 2]"}))
        else:
            raise DomainError(f"unknown oracle {name!r}")


@app.command()
def history(
    limit: int = typer.Option(20, "--limit", "-n", help="Entries to show"),
    clear: bool = typer.Option(False, "--clear", help="Clear the run history"),
    stats: bool = typer.Option(False, "--stats", help="Show summary statistics"),
):
    """Show the run history."""
    config = load_config()
    run_history = RunHistory(config)
    if clear:
        run_history.clear_history()
        ui.success("Run history cleared")
        return
    if stats:
        ui.show_report("Run statistics", run_history.get_stats())
        return
    entries = run_history.get_recent_entries(limit)
    if not entries:
        ui.info("No run history found")
        return
    ui.show_history([e.to_dict() for e in entries])


@app.command()
def configure():
    """Configure default seed, workers, output directory and estimator settings."""
    config = load_config()
    ui.info(f"Configuration file: {config.get_config_file()}")
    config.seed = typer.prompt("Default seed", default=config.seed, type=int)
    jobs = typer.prompt("Worker threads (0 = all available cores)", default=config.jobs or 0, type=int)
    config.jobs = jobs or None
    config.output_dir = typer.prompt("Output directory", default=config.output_dir)
    config.quantile = typer.prompt("Dimension quantile", default=config.quantile, type=float)
    config.n_sample = typer.prompt("Sample points per estimate", default=config.n_sample, type=int)
    config.history_enabled = typer.confirm("Keep a run history?", default=config.history_enabled)
    config.use_colors = typer.confirm("Use colors?", default=config.use_colors)
    try:
        Config(**config.model_dump()).save()
    except ValidationError as e:
        ui.error(f"Invalid setting: {e.errors()[0].get('msg')}")
        sys.exit(EXIT_USAGE)
    ui.success("Configuration saved")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI on `argv` (default: sys.argv) and return its exit code instead of exiting."""
    try:
        result = app(args=None if argv is None else [str(a) for a in argv], prog_name="spectrafrac", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        ui.warning("Aborted")
        return EXIT_FAILED
    except click.exceptions.ClickException as e:
        e.show()
        return e.exit_code
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else EXIT_FAILED
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())
