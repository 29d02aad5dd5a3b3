import os
from functools import partial, wraps

import click
import numpy as np

from claims_reserving import __version__, hooks
from claims_reserving.chainladder import chain_ladder_report, chain_ladder_to_json
from claims_reserving.commands.constants import (
    COMMON_HISTOGRAM_FILE,
    COMPARISON_FILE,
    PROG_NAME,
    REFERENCE_LINES_FILE,
    RESERVE_FILE,
)
from claims_reserving.commands.pipeline import (
    benchmark,
    fit_payload,
    load_triangle,
    obtain_fits,
    per_origin_reserves,
    reference_lines,
    run_metadata,
    write_reference_lines,
)
from claims_reserving.commands.utils import (
    create_commands_log,
    setup_logging,
    write_csv,
    write_grid,
    write_json,
    write_text,
)
from claims_reserving.constants import DEFAULT_HISTOGRAM_BINS, DEFAULT_N_DRAWS, DEFAULT_N_STARTS, DEFAULT_SEED, LOG_DIR_ENV
from claims_reserving.estimation import compare, fit_report, ranking_report
from claims_reserving.exceptions import ReservingError, ValidationError
from claims_reserving.kalman import kalman_smoother
from claims_reserving.reserving_log import ReservingLog, get_log_path
from claims_reserving.settings import RunConfig
from claims_reserving.simsmooth import (
    distribution_report,
    plug_in_reserve,
    reserve_distribution,
    write_common_histogram,
    write_draws,
    write_histogram,
)
from claims_reserving.triangle import validate_runoff
from claims_reserving.utils import dumps


class CommandError(click.ClickException):
    """A ReservingError surfaced on the command line with its exit code."""

    def __init__(self, error: ReservingError):
        super().__init__(error.message)
        self.exit_code = error.exit_code


def handle_errors(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ReservingError as e:
            create_commands_log(status="Error", exception=e, method=func.__name__)
            raise CommandError(e)

    return wrapper


def parse_list(value: str | None, cast=str) -> tuple:
    if not value:
        return ()
    try:
        return tuple(cast(item.strip()) for item in value.split(",") if item.strip())
    except ValueError:
        raise ValidationError(f"Cannot read {value!r} as a comma separated list")


def input_options(func):
    options = [
        click.option("--input", "input_path", required=True, help="Triangle file (.csv, .tsv or .json)."),
        click.option("--strict", is_flag=True, help="Reject observed regions that are not upper-left runoff shapes."),
        click.option("--strict-positive", is_flag=True, help="Reject nonpositive observed cells when reading."),
        click.option(
            "--allow-epsilon-shift",
            "epsilon_shift",
            type=float,
            default=0.0,
            help="Add this amount to every incremental cell before taking logs.",
        ),
        click.option("--verbose", is_flag=True, help="Log progress to stderr."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def model_options(func):
    options = [
        click.option("--models", default="", help="Comma separated model names, e.g. Hertig,CC,Verrall,BSM."),
        click.option("--fits", multiple=True, help="Saved fit file to reuse instead of refitting (repeatable)."),
        click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True),
        click.option("--starts", "n_starts", type=int, default=DEFAULT_N_STARTS, show_default=True),
        click.option("--out", "out_dir", default=".", show_default=True, help="Output directory."),
        click.option("--format", "output_format", type=click.Choice(["json", "text"]), default="json"),
        click.option("--threads", type=int, default=None, help="Worker threads for fits and draws."),
        click.option("--true-reserve", type=float, default=None, help="Known reserve, for reference lines."),
        click.option("--log-dir", default=None, help="Directory for the JSON lines run log."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(for_simulation: bool = False, **options) -> RunConfig:
    setup_logging(options.pop("verbose", False))
    options["models"] = parse_list(options.get("models"))
    options["fits"] = tuple(options.get("fits") or ())
    if "quantiles" in options:
        options["quantiles"] = parse_list(options["quantiles"], float)
    config = RunConfig(**options).validate(for_simulation=for_simulation)
    if config.log_dir:
        os.environ[LOG_DIR_ENV] = config.log_dir
    if not config.models and not config.fits:
        raise ValidationError("Name at least one model (--models) or saved fit (--fits)")
    return config


@click.group(name=PROG_NAME)
@click.version_option(__version__, prog_name=PROG_NAME)
def cli():
    """State space claims reserving with a Chain-Ladder benchmark."""


@cli.command("validate")
@input_options
@click.option("--format", "output_format", type=click.Choice(["json", "text"]), default="text")
@handle_errors
def validate(verbose, output_format, **options):
    """Parse a triangle and report its shape, mask and positivity."""
    setup_logging(verbose)
    config = RunConfig(output_format=output_format, **options).validate()
    triangle = load_triangle(config)
    runoff = validate_runoff(triangle)
    shifted = triangle.values + triangle.epsilon_shift
    nonpositive = [(int(i), int(j)) for i, j in np.argwhere(triangle.observed & ~(shifted > 0))]

    if output_format == "json":
        click.echo(
            dumps(
                {
                    "shape": triangle.shape,
                    "n_observed": triangle.n_observed,
                    "n_unobserved": triangle.n_unobserved,
                    "is_justified": runoff.is_justified,
                    "is_regular": runoff.is_regular,
                    "issues": runoff.issues,
                    "nonpositive_cells": [[i + 1, j + 1] for i, j in nonpositive],
                }
            )
        )
        return

    click.echo(f"Triangle {triangle.n_origin} x {triangle.n_dev}")
    click.echo(f"{triangle.n_observed} observed / {triangle.n_unobserved} unobserved")
    shape = "regular runoff" if runoff.is_regular else "runoff" if runoff.is_justified else "irregular"
    click.echo(f"Observed region: {shape}")
    for issue in runoff.issues:
        click.echo(f"  {issue}")
    for i, j in nonpositive:
        click.echo(f"Nonpositive cell (row {i + 1}, column {j + 1}): {triangle.values[i, j]!r}")
    create_commands_log(status="Success", method="validate", message=f"Validated {config.input_path}")


@cli.command("fit")
@input_options
@model_options
@handle_errors
def fit_command(**options):
    """Fit models, compare them and write predicted and reconstructed grids."""
    config = build_config(**options)
    triangle = load_triangle(config)
    fits, errors = obtain_fits(config, triangle)

    for name, result in fits.items():
        if config.output_format == "json":
            write_json(config.out_dir, f"fit_{name}.json", fit_payload(result, config))
        else:
            write_text(config.out_dir, f"fit_{name}.txt", fit_report(result))
        metadata = run_metadata(config, model=name, recipe_version=result.recipe_version)
        smoothed = kalman_smoother(result.spec, result.series)
        write_grid(config.out_dir, f"predicted_{name}.csv", smoothed.prediction_grid(), triangle, metadata)
        _, full = plug_in_reserve(result, triangle)
        write_grid(config.out_dir, f"reconstructed_{name}.csv", full.values, triangle, metadata)
        click.echo(fit_report(result))

    ranking = compare(list(fits.values()))
    if config.output_format == "json":
        write_json(config.out_dir, f"{COMPARISON_FILE}.json", {"config": config.as_dict(), **ranking.as_dict()})
    else:
        write_text(config.out_dir, f"{COMPARISON_FILE}.txt", ranking_report(ranking))
    click.echo(ranking_report(ranking))
    _raise_first(errors)


@cli.command("reserve")
@input_options
@model_options
@handle_errors
def reserve_command(**options):
    """Plug-in reserve of every model next to the Chain-Ladder benchmark."""
    config = build_config(**options)
    triangle = load_triangle(config)
    fits, errors = obtain_fits(config, triangle)
    chain_ladder = benchmark(triangle)

    models = {}
    for name, result in fits.items():
        estimate, full = plug_in_reserve(result, triangle)
        entry = {
            "reserve": estimate,
            "recipe_version": result.recipe_version,
            "response_kind": result.response_kind,
            "origins": per_origin_reserves(full, triangle),
        }
        if config.true_reserve is not None:
            entry["difference_to_true"] = estimate - config.true_reserve
        models[name] = entry

    report = {
        "config": config.as_dict(),
        "models": models,
        "chain_ladder": chain_ladder_to_json(chain_ladder) if chain_ladder else None,
        "true_reserve": config.true_reserve,
    }
    text = _reserve_text(models, chain_ladder, config)
    if config.output_format == "json":
        write_json(config.out_dir, f"{RESERVE_FILE}.json", report)
    else:
        write_text(config.out_dir, f"{RESERVE_FILE}.txt", text)
    click.echo(text)
    _raise_first(errors)


@cli.command("simulate")
@input_options
@model_options
@click.option("--draws", "n_draws", type=int, default=DEFAULT_N_DRAWS, show_default=True)
@click.option("--quantiles", default=None, help="Comma separated percentiles, e.g. 0.5,0.75,0.95.")
@click.option("--bins", "histogram_bins", type=int, default=DEFAULT_HISTOGRAM_BINS, show_default=True)
@handle_errors
def simulate_command(**options):
    """Sampling distribution of the reserve for every model."""
    if options.get("quantiles") is None:
        options.pop("quantiles", None)
    config = build_config(for_simulation=True, **options)
    triangle = load_triangle(config)
    fits, errors = obtain_fits(config, triangle)
    chain_ladder = benchmark(triangle)
    lines = reference_lines(config, chain_ladder)

    distributions = {}
    for name, result in fits.items():
        try:
            distribution = reserve_distribution(
                result,
                triangle,
                n_draws=config.n_draws,
                seed=config.seed,
                quantiles=config.quantiles,
                bins=config.histogram_bins,
                threads=config.threads,
            )
        except ReservingError as e:
            errors[name] = e
            continue
        distributions[name] = distribution

        metadata = run_metadata(config, model=name, recipe_version=result.recipe_version)
        write_csv(config.out_dir, f"draws_{name}.csv", partial(write_draws, distribution), metadata)
        write_csv(
            config.out_dir, f"histogram_{name}.csv", partial(write_histogram, distribution.summary.histogram), metadata
        )
        summary = {
            "config": config.as_dict(),
            "model": name,
            "recipe_version": result.recipe_version,
            "seed": config.seed,
            "distribution": distribution.as_dict(),
            "reference_lines": lines,
        }
        if config.output_format == "json":
            write_json(config.out_dir, f"summary_{name}.json", summary)
        else:
            write_text(config.out_dir, f"summary_{name}.txt", distribution_report(distribution))
        click.echo(distribution_report(distribution))

    versions = {name: fits[name].recipe_version for name in distributions}
    if distributions:
        write_csv(
            config.out_dir,
            COMMON_HISTOGRAM_FILE,
            partial(write_common_histogram, distributions, bins=config.histogram_bins),
            run_metadata(config, recipe_versions=versions),
        )
    write_csv(
        config.out_dir,
        REFERENCE_LINES_FILE,
        partial(write_reference_lines, lines),
        run_metadata(config, recipe_versions=versions),
    )
    create_commands_log(status="Success", method="simulate", message=f"Simulated {len(distributions)} model(s)")
    _raise_first(errors)


@cli.command("clear-logs")
@click.option("--log-dir", default=None, help=f"Directory of the run log (defaults to ${LOG_DIR_ENV}).")
@click.option(
    "--days",
    type=click.IntRange(min=0),
    default=None,
    help=f"Keep successful records newer than this many days [default: {hooks.default_log_clearing_days}].",
)
@handle_errors
def clear_logs(log_dir, days):
    """Drop old successful records from the run log; errors are kept."""
    path = get_log_path(log_dir)
    if path is None:
        raise ValidationError(f"No run log to clear; pass --log-dir or set {LOG_DIR_ENV}")
    removed = ReservingLog.clear_old_logs(days=days, log_dir=log_dir)
    click.echo(f"Removed {removed} record(s) from {path}")


def _raise_first(errors: dict[str, ReservingError]):
    if errors:
        raise errors[min(errors)]


def _reserve_text(models: dict, chain_ladder, config: RunConfig) -> str:
    lines = [f"{'method':<12} {'reserve':>18}"]
    for name, entry in models.items():
        line = f"{name:<12} {entry['reserve']:>18,.2f}"
        if "difference_to_true" in entry:
            line += f"   {entry['difference_to_true']:+,.2f} vs true"
        lines.append(line)
    if chain_ladder is not None:
        line = f"{'CL':<12} {chain_ladder.total_reserve:>18,.2f}"
        if config.true_reserve is not None:
            line += f"   {chain_ladder.total_reserve - config.true_reserve:+,.2f} vs true"
        lines.append(line)
    if config.true_reserve is not None:
        lines.append(f"{'True R':<12} {config.true_reserve:>18,.2f}")
    for name, entry in models.items():
        lines.append(f"{name} by origin:")
        lines.extend(f"  {o['origin']:<10} {o['reserve']:>18,.2f}" for o in entry["origins"])
    text = "\n".join(lines) + "\n"
    if chain_ladder is not None:
        text += chain_ladder_report(chain_ladder)
    return text


def main():
    cli(prog_name=PROG_NAME)


commands = [cli]
