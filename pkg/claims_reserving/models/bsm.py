import numpy as np

from claims_reserving.controllers.recipe import ModelName, RecipeController
from claims_reserving.exceptions import DimensionError
from claims_reserving.models.constants import DEFAULT_INITIAL_VARIANCE, EXAMPLE_LOG_LEVEL, WALK_VARIANCE_SHARE
from claims_reserving.models.utils import initial_variance
from claims_reserving.ssm import ComponentDef, ParamDescriptor, ParamMap, SsmSpec
from claims_reserving.triangle import ResponseKind, Sequencing, TransformedSeries, Triangle, sequence, transform


def structural_spec(n_times: int, period: int, sigma2: float, tau2_level: float, tau2_pattern: float) -> SsmSpec:
    """Local level plus a dummy-seasonal pattern of length `period`.

    State is (level, g_t, g_{t-1}, ..., g_{t-period+2}); the pattern values of
    one period sum to the pattern disturbance.
    """
    k = period
    transition = np.zeros((k, k))
    transition[0, 0] = 1.0
    transition[1, 1:] = -1.0
    transition[2:, 1:-1] = np.eye(k - 2)

    design = np.zeros((1, k))
    design[0, :2] = 1.0
    state_cov = np.zeros((k, k))
    state_cov[0, 0] = tau2_level
    state_cov[1, 1] = tau2_pattern

    selection = np.eye(k)
    return SsmSpec.time_invariant(
        n_times,
        design=design,
        obs_variance=[sigma2],
        transition=transition,
        state_cov=state_cov,
        initial_mean=np.zeros(k),
        initial_cov=np.zeros((k, k)),
        diffuse=np.ones(k, dtype=bool),
        components=(ComponentDef("level", selection[:1]), ComponentDef("pattern", selection[1:2])),
        state_names=("level", "pattern") + tuple(f"pattern_lag_{s}" for s in range(1, k - 1)),
    )


class BSMRecipe(RecipeController):
    """Row-wise stacked log incremental claims: level, development pattern and noise."""

    name = ModelName("BSM")
    version = "1"
    response_kind = ResponseKind.LOG_INCREMENTAL
    sequencing = Sequencing.ROW_WISE
    declared_q = 3

    def build(self, triangle: Triangle) -> tuple[TransformedSeries, ParamMap]:
        grid = transform(triangle, self.response_kind)
        series = sequence(grid, self.sequencing, self.response_kind)
        return series, self.param_map(triangle.shape, initial_variance(grid))

    def build_for_shape(self, shape: tuple[int, int]) -> ParamMap:
        return self.param_map(shape, DEFAULT_INITIAL_VARIANCE)

    def param_map(self, shape: tuple[int, int], sigma2: float) -> ParamMap:
        n_origin, n_dev = shape
        if n_dev < 2:
            raise DimensionError("The development pattern needs at least two lags")
        n_times = n_origin * n_dev

        def rule(values):
            return structural_spec(n_times, n_dev, values["sigma2"], values["tau2_level"], values["tau2_pattern"])

        return ParamMap(
            (
                ParamDescriptor("sigma2", initial=sigma2),
                ParamDescriptor("tau2_level", initial=WALK_VARIANCE_SHARE * sigma2),
                ParamDescriptor("tau2_pattern", initial=WALK_VARIANCE_SHARE * sigma2),
            ),
            rule,
        )

    def example_state(self, shape: tuple[int, int]) -> np.ndarray:
        # pattern over lags, centred; the state holds it for lags m-1 down to 1
        n_dev = shape[1]
        pattern = -0.35 * np.arange(n_dev)
        pattern -= pattern.mean()
        return np.concatenate([[EXAMPLE_LOG_LEVEL], pattern[:0:-1]])


def build_bsm(t: Triangle) -> tuple[TransformedSeries, ParamMap]:
    return BSMRecipe().build(t)
