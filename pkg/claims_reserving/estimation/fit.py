from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from claims_reserving.constants import DEFAULT_N_STARTS, DEFAULT_SEED
from claims_reserving.estimation.constants import (
    DEGENERATE_VARIANCE,
    LOG_VARIANCE_BOUNDS,
    MAX_ITER_PER_PARAM,
    RELATIVE_FATOL,
    START_JITTER,
    XATOL,
    FitStatus,
)
from claims_reserving.estimation.utils import create_estimation_log
from claims_reserving.exceptions import EstimationError, NumericalError, UnderIdentifiedError, ValidationError
from claims_reserving.kalman import kalman_filter
from claims_reserving.ssm import ParamMap, SsmSpec, materialize
from claims_reserving.triangle import ResponseKind, TransformedSeries
from claims_reserving.utils import get_thread_count


@dataclass(frozen=True)
class StartTrace:
    start: tuple[float, ...]
    theta: tuple[float, ...]
    loglik: float
    n_iter: int
    n_eval: int
    status: FitStatus

    def as_dict(self) -> dict:
        return {
            "start": list(self.start),
            "theta": list(self.theta),
            "loglik": self.loglik,
            "n_iter": self.n_iter,
            "n_eval": self.n_eval,
            "status": self.status.value,
        }


@dataclass(frozen=True, eq=False)
class FitResult:
    theta: np.ndarray
    params: dict[str, float]
    loglik: float
    q: int
    n_obs: int
    n_diffuse: int
    status: FitStatus
    spec: SsmSpec
    series: TransformedSeries
    param_map: ParamMap
    trace: tuple[StartTrace, ...] = ()
    model: str | None = None
    recipe_version: str | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def n_eff(self) -> int:
        return self.n_obs - self.n_diffuse

    @property
    def aic(self) -> float:
        return -2 * self.loglik + 2 * self.q

    @property
    def bic(self) -> float:
        if self.n_eff <= 0:
            return float("nan")
        return -2 * self.loglik + self.q * float(np.log(self.n_eff))

    @property
    def response_kind(self) -> ResponseKind | None:
        return self.series.response_kind


class LikelihoodObjective:
    """Negative diffuse log-likelihood as a function of theta.

    Log-variance entries are clipped to LOG_VARIANCE_BOUNDS. Numerical
    failures map to +inf so the simplex moves away from them.
    """

    def __init__(self, param_map: ParamMap, series: TransformedSeries):
        self.param_map = param_map
        self.series = series
        self.log_variance = param_map.log_variance_mask()

    def clip(self, theta) -> np.ndarray:
        theta = np.array(theta, dtype=float)
        theta[self.log_variance] = np.clip(theta[self.log_variance], *LOG_VARIANCE_BOUNDS)
        return theta

    def __call__(self, theta) -> float:
        try:
            spec = materialize(self.param_map, self.clip(theta))
            loglik = kalman_filter(spec, self.series, store=False).loglik
        except (NumericalError, np.linalg.LinAlgError, FloatingPointError):
            return np.inf
        return -loglik if np.isfinite(loglik) else np.inf


def fit(
    param_map: ParamMap,
    series: TransformedSeries,
    n_starts: int = DEFAULT_N_STARTS,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
    model: str | None = None,
    recipe_version: str | None = None,
    starts: Sequence | None = None,
) -> FitResult:
    """Maximize the diffuse likelihood with multi-start Nelder-Mead.

    The first start is the map's initial theta, the others are jittered
    copies drawn from `seed`; explicit `starts` (in theta space) replace
    both. The best start wins; ties go to the lexicographically smallest
    theta so the result does not depend on the order of the starts.
    """
    objective = LikelihoodObjective(param_map, series)
    theta0 = param_map.initial_theta()
    q = param_map.q

    # identification and dimension problems do not depend on theta
    try:
        kalman_filter(materialize(param_map, objective.clip(theta0)), series, store=False)
    except UnderIdentifiedError as e:
        create_estimation_log(status="Error", exception=e, method="fit", request_data={"model": model})
        raise
    except NumericalError:
        pass

    if q == 0:
        return evaluate_fit(param_map, series, theta0, FitStatus.CONVERGED, model=model, recipe_version=recipe_version)

    if starts is None:
        rng = np.random.default_rng(seed)
        starts = [theta0] + [theta0 + START_JITTER * rng.standard_normal(q) for _ in range(max(0, n_starts - 1))]
    else:
        starts = [np.asarray(start, dtype=float).reshape(q) for start in starts]
        if not starts:
            raise ValidationError("At least one starting point is needed")

    with ThreadPoolExecutor(max_workers=get_thread_count(threads)) as pool:
        traces = list(pool.map(lambda start: _run_start(objective, start), starts))

    finite = [t for t in traces if np.isfinite(t.loglik)]
    if not finite:
        error = EstimationError(
            f"Likelihood was not finite at any of the {len(starts)} starting points", model=model
        )
        create_estimation_log(status="Error", exception=error, method="fit", request_data={"model": model})
        raise error

    best = sorted(finite, key=lambda t: (-t.loglik, *t.theta))[0]
    theta = objective.clip(best.theta)
    status = best.status
    variances = np.array(list(param_map.natural(theta).values()))[objective.log_variance]
    if np.any(variances < DEGENERATE_VARIANCE):
        status = FitStatus.DEGENERATE

    result = evaluate_fit(
        param_map,
        series,
        theta,
        status,
        trace=tuple(traces),
        model=model,
        recipe_version=recipe_version,
    )
    create_estimation_log(
        status="Success",
        method="fit",
        message=f"{model or 'model'}: loglik {result.loglik:.4f}, BIC {result.bic:.4f}, {status.value}",
        response_data={"theta": theta, "params": result.params},
    )
    return result


def evaluate_fit(
    param_map: ParamMap,
    series: TransformedSeries,
    theta,
    status: FitStatus = FitStatus.CONVERGED,
    trace: tuple[StartTrace, ...] = (),
    model: str | None = None,
    recipe_version: str | None = None,
) -> FitResult:
    """FitResult for a given theta without optimizing (used for saved fits)."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    spec = materialize(param_map, theta)
    filtered = kalman_filter(spec, series, store=False)
    return FitResult(
        theta=theta,
        params=param_map.natural(theta),
        loglik=filtered.loglik,
        q=param_map.q,
        n_obs=filtered.n_obs,
        n_diffuse=filtered.n_diffuse,
        status=FitStatus(status),
        spec=spec,
        series=series,
        param_map=param_map,
        trace=trace,
        model=model,
        recipe_version=recipe_version,
        metadata={"degenerate_innovations": filtered.degenerate},
    )


def _run_start(objective: LikelihoodObjective, start: np.ndarray) -> StartTrace:
    q = len(start)
    max_iter = MAX_ITER_PER_PARAM * q
    f0 = objective(start)
    fatol = RELATIVE_FATOL * max(1.0, abs(f0)) if np.isfinite(f0) else RELATIVE_FATOL
    result = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"maxiter": max_iter, "maxfev": 4 * max_iter, "xatol": XATOL, "fatol": fatol},
    )

    if result.success:
        status = FitStatus.CONVERGED
    else:
        status = FitStatus.MAX_ITER
    theta = objective.clip(result.x)
    loglik = -float(result.fun) if np.isfinite(result.fun) else -np.inf
    return StartTrace(
        start=tuple(float(v) for v in start),
        theta=tuple(float(v) for v in theta),
        loglik=loglik,
        n_iter=int(result.nit),
        n_eval=int(result.nfev),
        status=status,
    )
