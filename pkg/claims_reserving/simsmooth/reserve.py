from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from claims_reserving.constants import (
    DEFAULT_HISTOGRAM_BINS,
    DEFAULT_N_DRAWS,
    DEFAULT_QUANTILES,
    DEFAULT_SEED,
    MAX_REJECTION_RATE,
)
from claims_reserving.estimation import FitResult
from claims_reserving.exceptions import DimensionError, SimulationError, ValidationError
from claims_reserving.kalman import kalman_smoother
from claims_reserving.simsmooth.constants import QUANTILE_METHOD
from claims_reserving.simsmooth.sampler import MeanCorrectionSampler
from claims_reserving.simsmooth.utils import create_simsmooth_log
from claims_reserving.triangle import Triangle, reconstruct_grid, reconstruct_incremental, reserve_sum
from claims_reserving.utils import to_jsonable


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def rows(self) -> list[tuple[float, float, int]]:
        return [
            (float(left), float(right), int(count))
            for left, right, count in zip(self.edges[:-1], self.edges[1:], self.counts, strict=True)
        ]


@dataclass(frozen=True, eq=False)
class Summary:
    n: int
    mean: float
    median: float
    q1: float
    q3: float
    qrange: float
    std: float
    cv: float
    percentiles: dict[float, float]
    histogram: Histogram

    @property
    def suggested_reserve(self) -> float:
        """Third quartile of the draws."""
        return self.q3

    def as_dict(self) -> dict:
        return to_jsonable(
            {
                "n": self.n,
                "mean": self.mean,
                "median": self.median,
                "q1": self.q1,
                "q3": self.q3,
                "qrange": self.qrange,
                "std": self.std,
                "cv": self.cv,
                "suggested_reserve": self.suggested_reserve,
                "percentiles": {f"{q:g}": value for q, value in self.percentiles.items()},
            }
        )


@dataclass(frozen=True, eq=False)
class ReserveDistribution:
    draws: np.ndarray
    n_draws: int
    seed: int | None
    summary: Summary
    point_estimate: float
    n_rejected: int = 0
    model: str | None = None
    includes_observation_noise: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def mc_standard_error(self) -> float:
        """Monte-Carlo standard error of the mean of the draws."""
        return self.summary.std / np.sqrt(self.summary.n)

    def as_dict(self) -> dict:
        return to_jsonable(
            {
                "model": self.model,
                "n_draws": self.n_draws,
                "n_accepted": self.summary.n,
                "n_rejected": self.n_rejected,
                "seed": self.seed,
                "point_estimate": self.point_estimate,
                "mc_standard_error": self.mc_standard_error,
                "includes_observation_noise": self.includes_observation_noise,
                "summary": self.summary.as_dict(),
                "metadata": self.metadata,
            }
        )


def summarize(
    draws,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    bins: int = DEFAULT_HISTOGRAM_BINS,
    bin_range: tuple[float, float] | None = None,
) -> Summary:
    """Summary measures and equal-width histogram of reserve draws.

    Quantiles interpolate linearly between order statistics.
    """
    draws = np.asarray(draws, dtype=float).reshape(-1)
    if draws.size < 2:
        raise ValidationError(f"At least two draws are needed for a summary, got {draws.size}")
    if not np.all(np.isfinite(draws)):
        raise ValidationError("Draws must be finite")

    quantiles = tuple(float(q) for q in quantiles)
    if any(not 0 < q < 1 for q in quantiles):
        raise ValidationError(f"Quantiles must lie strictly between 0 and 1, got {quantiles}")
    q1, median, q3 = np.quantile(draws, [0.25, 0.5, 0.75], method=QUANTILE_METHOD)
    percentiles = np.quantile(draws, quantiles, method=QUANTILE_METHOD) if quantiles else []

    mean = float(np.mean(draws))
    std = float(np.std(draws, ddof=1))
    cv = std / mean if mean != 0 else float("nan")
    counts, edges = np.histogram(draws, bins=bins, range=bin_range)

    return Summary(
        n=int(draws.size),
        mean=mean,
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        qrange=float(q3 - q1),
        std=std,
        cv=float(cv),
        percentiles={q: float(v) for q, v in zip(quantiles, percentiles, strict=True)},
        histogram=Histogram(edges=edges, counts=counts),
    )


def plug_in_reserve(fit: FitResult, triangle: Triangle) -> tuple[float, Triangle]:
    """Reserve from the smoothed-mean predictions and the completed triangle."""
    _check_shape(fit, triangle)
    smoothed = kalman_smoother(fit.spec, fit.series)
    full = reconstruct_incremental(smoothed.prediction_grid(), triangle, fit.response_kind)
    return reserve_sum(full, triangle.unobserved), full


def reserve_distribution(
    fit: FitResult,
    triangle: Triangle,
    n_draws: int = DEFAULT_N_DRAWS,
    seed: int | None = DEFAULT_SEED,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    bins: int = DEFAULT_HISTOGRAM_BINS,
    threads: int | None = None,
) -> ReserveDistribution:
    """Sampling distribution of the reserve, holding the fitted parameters fixed.

    Each draw fills the missing responses, inverts the transform and sums the
    unobserved cells. Draws that overflow are rejected; more than 1% of
    rejections fails the run.
    """
    _check_shape(fit, triangle)
    smoothed = kalman_smoother(fit.spec, fit.series)
    sampler = MeanCorrectionSampler(smoothed)
    unobserved = triangle.unobserved

    def reduce(_, responses):
        grids = sampler.response_grids(responses)
        full = reconstruct_grid(grids, triangle, fit.response_kind)
        return np.sum(full[:, unobserved], axis=1)

    with np.errstate(over="ignore", invalid="ignore"):
        reserves = np.concatenate(sampler.map_chunks(n_draws, seed, reduce, threads))

    finite = np.isfinite(reserves)
    n_rejected = int((~finite).sum())
    if n_rejected > MAX_REJECTION_RATE * n_draws:
        error = SimulationError(
            f"{n_rejected} of {n_draws} draws overflowed when transformed back to claims", rejected=n_rejected
        )
        create_simsmooth_log(status="Error", exception=error, method="reserve_distribution", request_data={"model": fit.model})
        raise error

    point_estimate = float(reserve_sum(reconstruct_incremental(smoothed.prediction_grid(), triangle, fit.response_kind)))
    draws = reserves[finite]
    distribution = ReserveDistribution(
        draws=draws,
        n_draws=n_draws,
        seed=seed,
        summary=summarize(draws, quantiles=quantiles, bins=bins),
        point_estimate=point_estimate,
        n_rejected=n_rejected,
        model=fit.model,
        includes_observation_noise=True,
        metadata={
            "recipe_version": fit.recipe_version,
            "response_kind": fit.response_kind,
            "parameters": fit.params,
            "parameter_uncertainty": False,
        },
    )
    create_simsmooth_log(
        status="Success",
        method="reserve_distribution",
        message=f"{fit.model or 'model'}: {draws.size} draws, {n_rejected} rejected",
    )
    return distribution


def _check_shape(fit: FitResult, triangle: Triangle):
    if fit.series.shape != triangle.shape:
        raise DimensionError(f"Fit was made on a {fit.series.shape} grid, triangle is {triangle.shape}")
    if fit.response_kind is None:
        raise ValidationError("Fit has no response kind, so its predictions cannot be turned into claims")
