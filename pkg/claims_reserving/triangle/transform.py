from dataclasses import dataclass

import numpy as np

from claims_reserving.exceptions import (
    DimensionError,
    PositivityViolation,
    ReconstructionError,
    ValidationError,
)
from claims_reserving.triangle.constants import ResponseKind, Sequencing, TriangleKind
from claims_reserving.triangle.triangle import Triangle, cumulate, decumulate, dev_ratios

Cell = tuple[int, int]


@dataclass(frozen=True, eq=False)
class TransformedSeries:
    """Time-indexed responses handed to a state space model.

    `observations[t]` is the response vector at time t (NaN for missing
    elements) and `cells[t][e]` the grid cell element e came from. Times are
    0-based here; the calendar-year time of cell (i, j) is i + j.
    """

    sequencing: Sequencing
    observations: tuple[np.ndarray, ...]
    cells: tuple[tuple[Cell, ...], ...]
    shape: tuple[int, int]
    response_kind: ResponseKind | None = None

    def __post_init__(self):
        observations = []
        for t, (y, cells) in enumerate(zip(self.observations, self.cells, strict=True)):
            y = np.array(y, dtype=float).reshape(-1)
            if len(y) != len(cells):
                raise DimensionError(f"Time {t} has {len(y)} responses but {len(cells)} cells")
            y.setflags(write=False)
            observations.append(y)
        object.__setattr__(self, "observations", tuple(observations))
        object.__setattr__(self, "cells", tuple(tuple((int(i), int(j)) for i, j in c) for c in self.cells))

    @classmethod
    def from_vectors(cls, observations, sequencing: Sequencing = Sequencing.CALENDAR_YEAR) -> "TransformedSeries":
        """Wrap plain response vectors; element e of time t maps to cell (t, e)."""
        observations = [np.atleast_1d(np.asarray(y, dtype=float)) for y in observations]
        width = max((len(y) for y in observations), default=0)
        cells = [tuple((t, e) for e in range(len(y))) for t, y in enumerate(observations)]
        return cls(
            sequencing=sequencing,
            observations=tuple(observations),
            cells=tuple(cells),
            shape=(len(observations), width),
        )

    @property
    def n_times(self) -> int:
        return len(self.observations)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(y) for y in self.observations)

    @property
    def n_observed(self) -> int:
        return int(sum(np.isfinite(y).sum() for y in self.observations))

    def to_grid(self, vectors=None) -> np.ndarray:
        """Scatter per-time vectors (the observations by default) back onto the grid."""
        vectors = self.observations if vectors is None else vectors
        grid = np.full(self.shape, np.nan)
        for values, cells in zip(vectors, self.cells, strict=True):
            for value, (i, j) in zip(values, cells, strict=True):
                grid[i, j] = value
        return grid


def transform(t: Triangle, response_kind: ResponseKind) -> np.ndarray:
    """Log of the incremental, cumulative or development-ratio form.

    The epsilon shift recorded on the triangle is added to every observed
    incremental amount first. Unobserved cells are NaN.
    """
    response_kind = ResponseKind(response_kind)
    incremental = _shifted_incremental(t)

    if response_kind == ResponseKind.LOG_INCREMENTAL:
        form = incremental.observed_values
    elif response_kind == ResponseKind.LOG_CUMULATIVE:
        form = cumulate(incremental).observed_values
    else:
        _check_positive(incremental)
        form = dev_ratios(cumulate(incremental))

    _check_positive(incremental.replace(values=np.where(t.observed, form, np.nan)))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t.observed, np.log(form), np.nan)


def sequence(grid: np.ndarray, sequencing: Sequencing, response_kind: ResponseKind | None = None) -> TransformedSeries:
    """Assign a time index to every grid cell.

    Row-wise: one scalar per cell, row after row. Calendar year: one vector
    per diagonal i + j, elements ordered by increasing lag.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2:
        raise DimensionError("sequence expects a two dimensional grid")
    n_origin, n_dev = grid.shape
    sequencing = Sequencing(sequencing)

    if sequencing == Sequencing.ROW_WISE:
        cells = [((i, j),) for i in range(n_origin) for j in range(n_dev)]
    else:
        cells = [
            tuple((s - j, j) for j in range(n_dev) if 0 <= s - j < n_origin) for s in range(n_origin + n_dev - 1)
        ]

    observations = [np.array([grid[i, j] for i, j in c]) for c in cells]
    return TransformedSeries(
        sequencing=sequencing,
        observations=tuple(observations),
        cells=tuple(cells),
        shape=(n_origin, n_dev),
        response_kind=response_kind,
    )


def reconstruct_grid(predicted: np.ndarray, t: Triangle, response_kind: ResponseKind) -> np.ndarray:
    """Invert the log transform chain for one grid or a stack of grids.

    `predicted` has shape (..., n_origin, n_dev) on the transformed scale.
    The result holds incremental amounts with observed cells copied from
    `t`. Non-finite results are returned as they are so that callers working
    on many draws can reject them individually.
    """
    response_kind = ResponseKind(response_kind)
    predicted = np.asarray(predicted, dtype=float)
    if predicted.shape[-2:] != t.shape:
        raise DimensionError(f"Prediction grid has shape {predicted.shape[-2:]}, triangle has {t.shape}")

    unobserved = t.unobserved
    if np.isnan(predicted[..., unobserved]).any():
        raise ReconstructionError("Prediction grid does not cover every unobserved cell")

    if response_kind != ResponseKind.LOG_INCREMENTAL and not t.has_row_prefixes():
        raise ValidationError("Cumulative responses need every row observed from the first lag without gaps")

    incremental = _shifted_incremental(t)
    observed_x = np.where(t.observed, incremental.values, 0.0)
    original = decumulate(t).values if t.kind == TriangleKind.CUMULATIVE else t.values

    with np.errstate(over="ignore", invalid="ignore"):
        if response_kind == ResponseKind.LOG_INCREMENTAL:
            full = np.where(unobserved, np.exp(predicted), observed_x)
        elif response_kind == ResponseKind.LOG_CUMULATIVE:
            cumulative = np.where(t.observed, np.cumsum(observed_x, axis=1), 0.0)
            cumulative = np.where(unobserved, np.exp(predicted), cumulative)
            full = np.diff(cumulative, axis=-1, prepend=0.0)
        else:
            full = _from_log_ratios(predicted, t, observed_x)

    return np.where(unobserved, full - t.epsilon_shift, original)


def reconstruct_incremental(predicted: np.ndarray, t: Triangle, response_kind: ResponseKind) -> Triangle:
    full = reconstruct_grid(predicted, t, response_kind)
    if full.ndim != 2:
        raise DimensionError("reconstruct_incremental takes a single grid; use reconstruct_grid for stacks")
    if not np.all(np.isfinite(full)):
        i, j = np.argwhere(~np.isfinite(full))[0]
        raise ReconstructionError(f"Reconstructed claims at (row {i + 1}, column {j + 1}) are not finite")
    return t.replace(values=full, kind=TriangleKind.INCREMENTAL, epsilon_shift=0.0)


def series_to_json(series: TransformedSeries) -> dict:
    return {
        "sequencing": series.sequencing.value,
        "response_kind": series.response_kind.value if series.response_kind else None,
        "shape": list(series.shape),
        "observations": [[float(v) if np.isfinite(v) else None for v in y] for y in series.observations],
        "cells": [[list(c) for c in cells] for cells in series.cells],
    }


def _from_log_ratios(predicted: np.ndarray, t: Triangle, observed_x: np.ndarray) -> np.ndarray:
    # Each row restarts from its last observed cumulative amount (1 for empty rows).
    last = t.last_observed_lag()
    lags = np.arange(t.n_dev)
    cumulative = np.cumsum(observed_x, axis=1)
    anchor = np.where(last >= 0, cumulative[np.arange(t.n_origin), np.maximum(last, 0)], 1.0)

    factors = np.where(t.unobserved, np.exp(predicted), 1.0)
    factors = np.where(lags == last[:, None], anchor[:, None], factors)
    path = np.cumprod(factors, axis=-1)
    path = np.where(lags >= last[:, None], path, cumulative)
    return np.diff(path, axis=-1, prepend=0.0)


def _shifted_incremental(t: Triangle) -> Triangle:
    if t.kind == TriangleKind.CUMULATIVE:
        t = decumulate(t)
    if not t.epsilon_shift:
        return t
    return t.replace(values=np.where(t.observed, t.values + t.epsilon_shift, np.nan))


def _check_positive(t: Triangle):
    bad = t.observed & ~(t.values > 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise PositivityViolation((int(i), int(j)), float(t.values[i, j]))
