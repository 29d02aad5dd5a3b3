from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import TextIO

import numpy as np

from claims_reserving import __version__
from claims_reserving.chainladder import ChainLadderResult, cl_fit
from claims_reserving.commands.utils import create_commands_log, read_json
from claims_reserving.estimation import FitResult, FitStatus, evaluate_fit, fit, fit_to_json
from claims_reserving.exceptions import ReservingError, ValidationError
from claims_reserving.kalman import kalman_filter, residual_diagnostics
from claims_reserving.models import get_recipe, resolve_name
from claims_reserving.settings import RunConfig
from claims_reserving.triangle import Triangle, read_triangle
from claims_reserving.utils import get_thread_count


def load_triangle(config: RunConfig) -> Triangle:
    if not config.input_path:
        raise ValidationError("An input triangle is required (--input)")
    return read_triangle(
        config.input_path,
        strict=config.strict,
        strict_positive=config.strict or config.strict_positive,
        epsilon_shift=config.epsilon_shift,
    )


def fit_model(name: str, triangle: Triangle, config: RunConfig) -> FitResult:
    recipe = get_recipe(name)
    series, param_map = recipe.build(triangle)
    return fit(
        param_map,
        series,
        n_starts=config.n_starts,
        seed=config.seed,
        threads=config.threads,
        model=recipe.name,
        recipe_version=recipe.version,
    )


def fit_models(config: RunConfig, triangle: Triangle) -> tuple[dict[str, FitResult], dict[str, ReservingError]]:
    """Fit every configured model concurrently; failures are collected, not raised."""
    names = list(config.models)
    if not names:
        return {}, {}

    def work(name):
        try:
            return name, fit_model(name, triangle, config), None
        except ReservingError as e:
            return name, None, e

    workers = min(get_thread_count(config.threads), len(names))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(work, names))

    fits = {name: result for name, result, _ in outcomes if result is not None}
    errors = {name: error for name, _, error in outcomes if error is not None}
    return fits, errors


def load_fit(path: str, triangle: Triangle) -> FitResult:
    """Rebuild a saved fit on `triangle` at its stored parameters."""
    try:
        data = read_json(path)
    except (OSError, ValueError) as e:
        raise ValidationError(f"Cannot read saved fit {path}: {e}")
    try:
        name = resolve_name(data["model"])
        theta = np.asarray(data["theta"], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise ValidationError(f"Saved fit {path} has no model name or parameter vector")

    version = data.get("recipe_version")
    recipe = get_recipe(name, version=None if version is None else str(version))
    series, param_map = recipe.build(triangle)
    result = evaluate_fit(
        param_map,
        series,
        theta,
        status=FitStatus(data.get("status", FitStatus.CONVERGED.value)),
        model=recipe.name,
        recipe_version=recipe.version,
    )
    if data.get("n_obs") is not None and data["n_obs"] != result.n_obs:
        raise ValidationError(f"Saved fit {path} was made on a triangle with {data['n_obs']} observations")
    create_commands_log(status="Success", method="load_fit", message=f"Loaded {name} fit from {path}")
    return result


def obtain_fits(config: RunConfig, triangle: Triangle) -> tuple[dict[str, FitResult], dict[str, ReservingError]]:
    """Saved fits first, then fits for configured models that were not loaded."""
    loaded = {}
    for path in config.fits:
        result = load_fit(path, triangle)
        loaded[result.model] = result

    remaining = tuple(name for name in config.models if name not in loaded)
    fits, errors = fit_models(replace(config, models=remaining), triangle)
    ordered = {name: loaded.get(name) or fits.get(name) for name in (*loaded, *remaining)}
    return {name: result for name, result in ordered.items() if result is not None}, errors


def fit_payload(result: FitResult, config: RunConfig) -> dict:
    filtered = kalman_filter(result.spec, result.series)
    return {
        **fit_to_json(result),
        "config": config.as_dict(),
        "diagnostics": residual_diagnostics(filtered).as_dict(),
        "version": __version__,
    }


def benchmark(triangle: Triangle) -> ChainLadderResult | None:
    """Chain-Ladder benchmark, or None when the triangle does not support it."""
    try:
        return cl_fit(triangle)
    except ValidationError as e:
        create_commands_log(status="Error", exception=e, method="benchmark")
        return None


def reference_lines(config: RunConfig, chain_ladder: ChainLadderResult | None) -> list[dict]:
    lines = []
    if config.true_reserve is not None:
        lines.append({"label": "True R", "value": float(config.true_reserve)})
    if chain_ladder is not None:
        lines.append({"label": "CL", "value": chain_ladder.total_reserve})
        if chain_ladder.std_error is not None:
            lines.append({"label": "CL+SE", "value": chain_ladder.total_reserve + chain_ladder.std_error})
    return lines


def write_reference_lines(lines: list[dict], stream: TextIO):
    stream.write("label,value\n")
    stream.writelines(f"{line['label']},{line['value']!r}\n" for line in lines)


def run_metadata(config: RunConfig, **extra) -> dict:
    """Run settings recorded next to every CSV output."""
    return {"config": config.as_dict(), "seed": config.seed, **extra}


def per_origin_reserves(full: Triangle, triangle: Triangle) -> list[dict]:
    amounts = np.where(triangle.unobserved, full.values, 0.0).sum(axis=1)
    return [{"origin": label, "reserve": float(v)} for label, v in zip(triangle.origin_labels, amounts, strict=True)]
