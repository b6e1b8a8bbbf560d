import json
import sys
from pathlib import Path

import click
from rich.table import Table

from experiments import dump_path, run_config
from timechange.dim_estimators import (
    LEBESGUE,
    box_dim_fit,
    empirical_lq,
    energy_profile,
    fourier_decay_fit,
    scan_frame,
)
from timechange.errors import TimeChangeError
from timechange.process_sim import SamplePath, TimeGrid
from utils import log_setup, report_writer
from utils.config_loader import (
    ConfigError,
    apply_overrides,
    build_config,
    list_presets,
    load_config_file,
    load_preset,
)
from utils.log_setup import console

DEFAULT_OUT = "runs"

# ------------------ SHARED OPTIONS ------------------


def run_options(func):
    """--seed/--ensemble/--grid-size/--jobs/--override/--out, shared by simulate and preset"""
    options = [
        click.option("--seed", type=int, help="Root seed of the ensemble."),
        click.option("--ensemble", type=int, help="Number of paths."),
        click.option("--grid-size", type=int, help="Grid points per path (2^k or 2^k + 1)."),
        click.option("--jobs", type=int, help="Parallel workers for ensembles (joblib n_jobs)."),
        click.option("--override", "-o", "overrides", multiple=True, help="Dotted key=value, e.g. estimator.rho=0.6"),
        click.option("--out", type=click.Path(file_okay=False), default=DEFAULT_OUT, show_default=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def flag_overrides(seed, ensemble, grid_size, jobs, overrides):
    flags = []
    if seed is not None:
        flags.append(f"simulation.root_seed={seed}")
    if ensemble is not None:
        flags.append(f"simulation.ensemble={ensemble}")
    if grid_size is not None:
        flags.append(f"simulation.grid_size={grid_size}")
    if jobs is not None:
        flags.append(f"simulation.n_jobs={jobs}")
    return flags + list(overrides)


def resolve(raw, name, overrides):
    try:
        return build_config(apply_overrides(raw, overrides), name)
    except ConfigError as e:
        raise click.UsageError(str(e)) from e


def show_checks(report):
    table = Table(title=f"{report.preset} checks")
    for column in ("check", "value", "lower", "upper", "asserted", "result"):
        table.add_column(column)
    for check in report.checks:
        result = "✅" if check.passed else ("❌" if check.asserted else "⚠️")
        table.add_row(
            check.name,
            "-" if check.value is None else f"{check.value:.6g}",
            "-" if check.lower is None else f"{check.lower:g}",
            "-" if check.upper is None else f"{check.upper:g}",
            "yes" if check.asserted else "no",
            result,
        )
    console.print(table)


# ------------------ COMMANDS ------------------


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def cli(verbose):
    """Simulate time-changed Brownian motion and measure its graph."""
    log_setup.setup_logging(verbose)


@cli.command("list-presets")
def list_presets_command():
    """List the bundled experiment presets."""
    table = Table(title="Presets")
    table.add_column("name", style="bold", no_wrap=True)
    table.add_column("kind", no_wrap=True)
    table.add_column("description")
    for name, kind, description in list_presets():
        table.add_row(name, kind, description)
    console.print(table)


@cli.command()
@click.argument("name")
@run_options
@click.option("--dump-paths", is_flag=True, help="Also write the sampled paths as CSV.")
def preset(name, seed, ensemble, grid_size, jobs, overrides, out, dump_paths):
    """Run preset NAME; exit 0 iff every asserted check passes."""
    try:
        raw = load_preset(name)
    except ConfigError as e:
        raise click.UsageError(str(e)) from e
    config = resolve(raw, name, flag_overrides(seed, ensemble, grid_size, jobs, overrides))

    try:
        report = run_config(config, out)
        if dump_paths and report.error is None:
            files = dump_path(config, Path(out) / name / "paths")
            log_setup.files_written(f"{len(files)} path files in {Path(out) / name / 'paths'}")
    except TimeChangeError as e:
        log_setup.error(str(e))
        sys.exit(1)

    log_setup.files_written(f"Report written to {Path(out) / name / report_writer.REPORT_FILE}")
    if report.error is not None:
        log_setup.error(report.error)
        sys.exit(1)
    show_checks(report)
    outside = [c.name for c in report.checks if not c.asserted and not c.passed]
    if outside:
        log_setup.warning(f"{name}: unasserted checks out of bounds: {', '.join(outside)}")
    if not report.passed:
        log_setup.error(f"{name}: asserted checks failed")
        sys.exit(1)
    log_setup.success(f"{name}: all asserted checks passed ({report.wall_clock_seconds:.1f}s)")


@cli.command()
@click.option("--preset", "preset_name", help="Take [variance] and [simulation] from this preset.")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), help="TOML file with [variance] and [simulation].")
@run_options
def simulate(preset_name, config_file, seed, ensemble, grid_size, jobs, overrides, out):
    """Sample an ensemble and dump each path as a t,x CSV."""
    if (preset_name is None) == (config_file is None):
        raise click.UsageError("Give exactly one of --preset or --config")
    try:
        raw = load_preset(preset_name) if preset_name else load_config_file(config_file)
    except ConfigError as e:
        raise click.UsageError(str(e)) from e
    raw = dict(raw)
    raw.setdefault("experiment", {"kind": "graph_dimension", "description": "ad-hoc simulation"})
    name = preset_name or Path(config_file).stem
    config = resolve(raw, name, flag_overrides(seed, ensemble, grid_size, jobs, overrides))

    try:
        files = dump_path(config, Path(out) / name / "paths")
    except TimeChangeError as e:
        log_setup.error(str(e))
        sys.exit(1)
    log_setup.files_written(f"{len(files) - 1} paths and a manifest in {Path(out) / name / 'paths'}")


@cli.command()
@click.argument("path_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["box", "lq", "energy", "fourier"]), default="box", show_default=True)
@click.option("--levels", nargs=2, type=int, help="n_min n_max for box counting and L^q.")
@click.option("--q", "q_values", type=float, multiple=True, default=(2.0,), show_default=True)
@click.option("--s", "s_values", type=float, multiple=True, default=(1.4, 1.6), show_default=True)
@click.option("--u-level", "u_levels", type=float, multiple=True, help="Frequency magnitudes (default 2^4..2^10).")
@click.option("--angles", type=int, default=64, show_default=True)
@click.option("--rho", type=float, default=0.5, show_default=True)
@click.option("--hurst", type=float, default=0.5, show_default=True, help="Recorded with the path; not used by estimators.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the result JSON here as well.")
def estimate(path_csv, method, levels, q_values, s_values, u_levels, angles, rho, hurst, out):
    """Run one estimator on a t,x CSV dump."""
    try:
        times, values = report_writer.read_path_csv(path_csv)
        path = SamplePath(TimeGrid(times), values, hurst, Path(path_csv).stem, seed=0)
        n_min, n_max = levels if levels else (None, None)

        if method == "box":
            fit = box_dim_fit(path, n_min, n_max)
            result = {
                "dimension": fit.value,
                "slope": fit.slope,
                "r_squared": fit.r_squared,
                "levels": list(fit.scales_used),
                "counts": list(fit.per_scale_counts),
            }
        elif method == "lq":
            level_range = range(n_min, n_max + 1) if levels else range(4, 11)
            result = {f"q={q:g}": empirical_lq(path, q, list(level_range)) for q in q_values}
        elif method == "energy":
            result = energy_profile(path, LEBESGUE, s_values)
        else:
            fit = fourier_decay_fit(path, LEBESGUE, list(u_levels) or [2.0**k for k in range(4, 11)], angles, rho)
            result = {
                "alpha_hat": fit.alpha_hat,
                "clamped": fit.clamped,
                "worst_direction_alpha": fit.worst_direction_alpha,
                "per_cone_slopes": fit.per_cone_slopes,
            }
            if out:
                report_writer.write_frame(scan_frame(fit.samples), Path(out).with_suffix(".scan.csv"))
    except TimeChangeError as e:
        log_setup.error(str(e))
        sys.exit(1)

    document = {"method": method, "path": str(path_csv), "result": report_writer.to_plain(result)}
    console.print_json(json.dumps(document, sort_keys=True))
    if out:
        report_writer.write_json(document, out)
        log_setup.files_written(f"Result written to {out}")


if __name__ == "__main__":
    cli()
