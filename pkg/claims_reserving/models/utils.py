import numpy as np

from claims_reserving.models.constants import DEFAULT_INITIAL_VARIANCE, MIN_INITIAL_VARIANCE, MODULE_NAME
from claims_reserving.reserving_log import create_log
from claims_reserving.triangle import Sequencing, sequence


def create_models_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)


def response_cells(shape: tuple[int, int], sequencing: Sequencing) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Cells per time point for a grid of `shape`; depends on the shape only."""
    return sequence(np.full(shape, np.nan), sequencing).cells


def initial_variance(grid: np.ndarray) -> float:
    """Variance of the observed responses around their column means, floored."""
    grid = np.asarray(grid, dtype=float)
    observed = np.isfinite(grid)
    counts = observed.sum(axis=0)
    means = np.where(observed, grid, 0.0).sum(axis=0) / np.maximum(counts, 1)
    residuals = (grid - means)[observed & (counts > 1)]
    if residuals.size < 2:
        return DEFAULT_INITIAL_VARIANCE
    variance = float(np.mean(residuals**2))
    if not np.isfinite(variance):
        return DEFAULT_INITIAL_VARIANCE
    return max(variance, MIN_INITIAL_VARIANCE)


def lag_rows(cells, n_columns: int, column_of) -> np.ndarray:
    """Design rows with a one in column `column_of(cell)` for each cell."""
    rows = np.zeros((len(cells), n_columns))
    for e, cell in enumerate(cells):
        rows[e, column_of(cell)] = 1.0
    return rows
