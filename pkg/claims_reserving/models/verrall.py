import numpy as np

from claims_reserving.controllers.recipe import ModelName, RecipeController
from claims_reserving.models.constants import DEFAULT_INITIAL_VARIANCE, EXAMPLE_LOG_LEVEL, WALK_VARIANCE_SHARE
from claims_reserving.models.utils import initial_variance, response_cells
from claims_reserving.ssm import ComponentDef, ParamDescriptor, ParamMap, SsmSpec
from claims_reserving.triangle import ResponseKind, Sequencing, TransformedSeries, Triangle, sequence, transform


def two_way_spec(
    cells,
    shape: tuple[int, int],
    sigma2: float,
    tau2_row: float,
    tau2_col: float,
    row_walk: bool = True,
) -> SsmSpec:
    """log x_ij = mu + a_i + b_j + eps_ij with a_0 = b_0 = 0.

    State layout is (mu, a_1..a_{n-1}, b_1..b_{m-1}). The development effects
    b_j are diffuse and drift across accident years at every calendar step.

    With `row_walk` the origin effects follow a random walk over accident
    years: a_i = a_{i-1} + eta_i is set at the calendar step where row i
    first reports, starting from a_0 = 0. Without it every a_i is a diffuse
    effect drifting like b_j, and with both walk variances zero the model is
    the fixed two-way regression.
    """
    n_origin, n_dev = shape
    k = n_origin + n_dev - 1
    n_times = len(cells)

    design = []
    for c in cells:
        rows = np.zeros((len(c), k))
        for e, (i, j) in enumerate(c):
            rows[e, 0] = 1.0
            if i:
                rows[e, i] = 1.0
            if j:
                rows[e, n_origin - 1 + j] = 1.0
        design.append(rows)

    col_walk = np.concatenate([np.zeros(n_origin), np.full(n_dev - 1, tau2_col)])
    diffuse = np.ones(k, dtype=bool)
    if row_walk:
        diffuse[1:n_origin] = False
        transition, state_cov = [], []
        for t in range(n_times):
            step = np.eye(k)
            cov = np.diag(col_walk)
            if 1 <= t < n_origin:
                step[t] = 0.0
                if t > 1:
                    step[t, t - 1] = 1.0
                cov[t, t] = tau2_row
            transition.append(step)
            state_cov.append(cov)
        transition, state_cov = tuple(transition), tuple(state_cov)
    else:
        walk = col_walk.copy()
        walk[1:n_origin] = tau2_row
        transition = (np.eye(k),) * n_times
        state_cov = (np.diag(walk),) * n_times

    selection = np.eye(k)
    return SsmSpec(
        design=tuple(design),
        obs_variance=tuple(np.full(len(c), sigma2) for c in cells),
        transition=transition,
        state_cov=state_cov,
        initial_mean=np.zeros(k),
        initial_cov=np.zeros((k, k)),
        diffuse=diffuse,
        components=(
            ComponentDef("level", selection[:1]),
            ComponentDef("origin_effects", selection[1:n_origin]),
            ComponentDef("development_effects", selection[n_origin:]),
        ),
        state_names=("mu",)
        + tuple(f"a_{i}" for i in range(1, n_origin))
        + tuple(f"b_{j}" for j in range(1, n_dev)),
    )


class VerrallRecipe(RecipeController):
    """Log incremental claims as level plus origin and development effects.

    Origin effects walk from one accident year to the next.
    """

    name = ModelName("Verrall")
    version = "2"
    response_kind = ResponseKind.LOG_INCREMENTAL
    sequencing = Sequencing.CALENDAR_YEAR
    declared_q = 3
    row_walk = True

    def build(self, triangle: Triangle) -> tuple[TransformedSeries, ParamMap]:
        grid = transform(triangle, self.response_kind)
        series = sequence(grid, self.sequencing, self.response_kind)
        return series, self.param_map(triangle.shape, initial_variance(grid))

    def build_for_shape(self, shape: tuple[int, int]) -> ParamMap:
        return self.param_map(shape, DEFAULT_INITIAL_VARIANCE)

    def param_map(self, shape: tuple[int, int], sigma2: float) -> ParamMap:
        cells = response_cells(shape, self.sequencing)

        def rule(values):
            return two_way_spec(
                cells, shape, values["sigma2"], values["tau2_row"], values["tau2_col"], row_walk=self.row_walk
            )

        return ParamMap(
            (
                ParamDescriptor("sigma2", initial=sigma2),
                ParamDescriptor("tau2_row", initial=WALK_VARIANCE_SHARE * sigma2),
                ParamDescriptor("tau2_col", initial=WALK_VARIANCE_SHARE * sigma2),
            ),
            rule,
        )

    def example_state(self, shape: tuple[int, int]) -> np.ndarray:
        n_origin, n_dev = shape
        return np.concatenate(
            [[EXAMPLE_LOG_LEVEL], 0.05 * np.arange(1, n_origin), -0.35 * np.arange(1, n_dev)]
        )


class FixedRowsVerrallRecipe(VerrallRecipe):
    """Every origin effect is a free diffuse effect; kept for saved version 1 fits."""

    version = "1"
    row_walk = False


def build_verrall(t: Triangle) -> tuple[TransformedSeries, ParamMap]:
    return VerrallRecipe().build(t)
