import numpy as np

from claims_reserving.constants import DEFAULT_SEED
from claims_reserving.exceptions import SimulationError
from claims_reserving.models.constants import MAX_SIMULATION_ATTEMPTS
from claims_reserving.models.registry import get_recipe
from claims_reserving.models.utils import create_models_log, response_cells
from claims_reserving.simsmooth import simulate_responses
from claims_reserving.triangle import ResponseKind, TransformedSeries, Triangle, cumulative_from_ratios


def simulate_triangle(
    name: str,
    params: dict[str, float],
    shape: tuple[int, int],
    seed: int | None = DEFAULT_SEED,
    initial_state=None,
    max_attempts: int = MAX_SIMULATION_ATTEMPTS,
) -> Triangle:
    """Complete triangle of incremental claims drawn from a model.

    Every cell holds its simulated amount and the observed mask is the
    regular runoff shape, so `reserve_sum` of the result is the true reserve.
    Paths with a nonpositive or overflowing cell are redrawn from the same
    generator, so the result is always valid input for the recipe.
    """
    recipe = get_recipe(name)
    spec = recipe.build_for_shape(shape).evaluate(params)
    if initial_state is None:
        initial_state = recipe.example_state(shape)

    rng = np.random.default_rng(seed)
    cells = response_cells(shape, recipe.sequencing)
    for attempt in range(1, max_attempts + 1):
        responses, _ = simulate_responses(spec, initial_state, rng)
        grid = TransformedSeries(recipe.sequencing, responses, cells, shape).to_grid()
        with np.errstate(over="ignore", invalid="ignore"):
            values = to_incremental(grid, recipe.response_kind)
        if np.all(np.isfinite(values)) and np.all(values > 0):
            break
    else:
        error = SimulationError(
            f"No positive {shape[0]}x{shape[1]} triangle from {recipe.name} in {max_attempts} attempts",
            params=params,
            seed=seed,
        )
        create_models_log(status="Error", exception=error, method="simulate_triangle")
        raise error

    n_origin, n_dev = shape
    observed = np.add.outer(np.arange(n_origin), np.arange(n_dev)) <= n_origin - 1
    create_models_log(
        status="Success",
        method="simulate_triangle",
        message=f"Simulated {n_origin}x{n_dev} triangle from {recipe.name} in {attempt} attempt(s)",
        request_data={"params": params, "seed": seed, "recipe_version": recipe.version},
    )
    return Triangle(values=values, observed=observed)


def to_incremental(grid: np.ndarray, response_kind: ResponseKind) -> np.ndarray:
    """Incremental claims from a complete grid of responses."""
    response_kind = ResponseKind(response_kind)
    levels = np.exp(grid)
    if response_kind == ResponseKind.LOG_INCREMENTAL:
        return levels
    if response_kind == ResponseKind.LOG_DEV_RATIO:
        levels = cumulative_from_ratios(levels)
    return np.diff(levels, axis=-1, prepend=0.0)
