import numpy as np

from claims_reserving.controllers.recipe import ModelName, RecipeController
from claims_reserving.models.constants import DEFAULT_INITIAL_VARIANCE, EXAMPLE_LOG_LEVEL, EXAMPLE_TAIL_GROWTH
from claims_reserving.models.utils import initial_variance, lag_rows, response_cells
from claims_reserving.ssm import ComponentDef, ParamDescriptor, ParamMap, SsmSpec
from claims_reserving.triangle import ResponseKind, Sequencing, TransformedSeries, Triangle, sequence, transform


def lag_effects_spec(cells, n_dev: int, sigma2: float, tau2: float = 0.0) -> SsmSpec:
    """One effect per development lag on the log development ratios.

    The state is (delta_0, ..., delta_{m-1}); cell (i, j) observes delta_j.
    With calendar-year time every step moves each lag on to the next
    accident year, so `tau2` is the variance of that accident-year walk.
    """
    n_times = len(cells)
    identity = np.eye(n_dev)
    return SsmSpec(
        design=tuple(lag_rows(c, n_dev, lambda cell: cell[1]) for c in cells),
        obs_variance=tuple(np.full(len(c), sigma2) for c in cells),
        transition=(identity,) * n_times,
        state_cov=(tau2 * identity,) * n_times,
        initial_mean=np.zeros(n_dev),
        initial_cov=np.zeros((n_dev, n_dev)),
        diffuse=np.ones(n_dev, dtype=bool),
        components=(ComponentDef("development", identity),),
        state_names=tuple(f"delta_{j}" for j in range(n_dev)),
    )


class HertigRecipe(RecipeController):
    """Log development ratios scattered around a fixed effect per lag."""

    name = ModelName("Hertig")
    version = "1"
    response_kind = ResponseKind.LOG_DEV_RATIO
    sequencing = Sequencing.CALENDAR_YEAR
    declared_q = 1

    def build(self, triangle: Triangle) -> tuple[TransformedSeries, ParamMap]:
        grid = transform(triangle, self.response_kind)
        series = sequence(grid, self.sequencing, self.response_kind)
        return series, self.param_map(triangle.shape, initial_variance(grid))

    def build_for_shape(self, shape: tuple[int, int]) -> ParamMap:
        return self.param_map(shape, DEFAULT_INITIAL_VARIANCE)

    def param_map(self, shape: tuple[int, int], sigma2: float) -> ParamMap:
        cells = response_cells(shape, self.sequencing)
        n_dev = shape[1]

        def rule(values):
            return lag_effects_spec(cells, n_dev, values["sigma2"])

        return ParamMap((ParamDescriptor("sigma2", initial=sigma2),), rule)

    def example_state(self, shape: tuple[int, int]) -> np.ndarray:
        lags = np.arange(1, shape[1])
        return np.concatenate([[EXAMPLE_LOG_LEVEL], np.log1p(EXAMPLE_TAIL_GROWTH + 2.75 * 0.6 ** (lags - 1))])


def build_hertig(t: Triangle) -> tuple[TransformedSeries, ParamMap]:
    return HertigRecipe().build(t)
