from dataclasses import dataclass

import numpy as np

from claims_reserving.chainladder.constants import MIN_MACK_ORIGINS, SUMMARY_FIELDS
from claims_reserving.chainladder.utils import create_chainladder_log
from claims_reserving.exceptions import ValidationError
from claims_reserving.triangle import Triangle, TriangleKind, cumulate
from claims_reserving.utils import to_jsonable


@dataclass(frozen=True, eq=False)
class MackResult:
    sigma2: np.ndarray
    process_variance: float
    estimation_variance: float
    per_origin_mse: np.ndarray

    @property
    def mse(self) -> float:
        return self.process_variance + self.estimation_variance

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.mse))

    @property
    def per_origin_se(self) -> np.ndarray:
        return np.sqrt(self.per_origin_mse)


@dataclass(frozen=True, eq=False)
class ChainLadderResult:
    factors: np.ndarray
    cumulative: np.ndarray
    latest: np.ndarray
    ultimates: np.ndarray
    reserves: np.ndarray
    origin_labels: tuple[str, ...]
    dev_labels: tuple[str, ...]
    mack: MackResult | None = None

    @property
    def total_reserve(self) -> float:
        return float(np.sum(self.reserves))

    @property
    def std_error(self) -> float | None:
        return self.mack.std_error if self.mack else None

    @property
    def cv(self) -> float | None:
        if self.mack is None or self.total_reserve == 0:
            return None
        return self.std_error / self.total_reserve

    @property
    def summary(self) -> dict[str, float | None]:
        reserve = self.total_reserve
        se = self.std_error
        values = (
            reserve,
            se,
            None if se is None else reserve + se,
            None if se is None else reserve + 2 * se,
            self.cv,
        )
        return dict(zip(SUMMARY_FIELDS, values, strict=True))

    def completed_triangle(self) -> Triangle:
        return Triangle(
            values=self.cumulative,
            observed=np.ones(self.cumulative.shape, dtype=bool),
            origin_labels=self.origin_labels,
            dev_labels=self.dev_labels,
            kind=TriangleKind.CUMULATIVE,
        )


def cl_fit(t: Triangle) -> ChainLadderResult:
    """Volume-weighted Chain-Ladder completion of a triangle.

    Incremental triangles are cumulated first. The Mack standard error is
    added when there are at least three origins.
    """
    cumulative, observed = _cumulative(t)
    factors, column_sums = development_factors(cumulative, observed)
    completed, last = _complete(cumulative, observed, factors)

    latest = completed[np.arange(len(last)), last]
    ultimates = completed[:, -1]
    mack = None
    if t.n_origin >= MIN_MACK_ORIGINS:
        mack = _mack(cumulative, observed, completed, last, factors, column_sums)

    result = ChainLadderResult(
        factors=factors,
        cumulative=completed,
        latest=latest,
        ultimates=ultimates,
        reserves=ultimates - latest,
        origin_labels=t.origin_labels,
        dev_labels=t.dev_labels,
        mack=mack,
    )
    create_chainladder_log(
        status="Success",
        method="cl_fit",
        message=f"Chain-Ladder reserve {result.total_reserve:.2f}",
        response_data=result.summary,
    )
    return result


def mack_se(t: Triangle) -> MackResult:
    """Mack estimate of the prediction error of the total Chain-Ladder reserve."""
    if t.n_origin < MIN_MACK_ORIGINS:
        raise ValidationError(f"The Mack standard error needs at least {MIN_MACK_ORIGINS} origins, got {t.n_origin}")
    cumulative, observed = _cumulative(t)
    factors, column_sums = development_factors(cumulative, observed)
    completed, last = _complete(cumulative, observed, factors)
    return _mack(cumulative, observed, completed, last, factors, column_sums)


def development_factors(cumulative: np.ndarray, observed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """f_j = sum C_{i,j+1} / sum C_{i,j} over rows observed at both lags; also returns the denominators."""
    pairs = observed[:, :-1] & observed[:, 1:]
    n_dev = cumulative.shape[1]
    factors = np.empty(n_dev - 1)
    column_sums = np.empty(n_dev - 1)
    for j in range(n_dev - 1):
        rows = pairs[:, j]
        if not rows.any():
            raise ValidationError(f"No origin is observed at both lag {j} and lag {j + 1}", lag=j)
        denominator = float(np.sum(cumulative[rows, j]))
        if denominator == 0:
            raise ValidationError(f"Cumulative claims at lag {j} sum to zero", lag=j)
        factors[j] = float(np.sum(cumulative[rows, j + 1])) / denominator
        column_sums[j] = denominator
    return factors, column_sums


def mack_sigma2(cumulative: np.ndarray, observed: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Per-lag variance parameters; lags with a single pair are extrapolated."""
    pairs = observed[:, :-1] & observed[:, 1:]
    sigma2 = np.full(len(factors), np.nan)
    for j, f in enumerate(factors):
        rows = pairs[:, j]
        if rows.sum() < 2:
            continue
        c = cumulative[rows, j]
        ratios = cumulative[rows, j + 1] / c
        sigma2[j] = float(np.sum(c * (ratios - f) ** 2)) / (rows.sum() - 1)

    for j in range(len(sigma2)):
        if not np.isnan(sigma2[j]):
            continue
        if j >= 2 and not np.isnan(sigma2[j - 2]):
            sigma2[j] = _extrapolate(sigma2[j - 2], sigma2[j - 1])
        elif j >= 1:
            sigma2[j] = sigma2[j - 1]
        else:
            raise ValidationError("Too few origins to estimate the variance of the first development factor")
    return sigma2


def _extrapolate(before_last: float, last: float) -> float:
    if before_last == 0:
        return 0.0
    return min(last**2 / before_last, before_last, last)


def _mack(cumulative, observed, completed, last, factors, column_sums) -> MackResult:
    sigma2 = mack_sigma2(cumulative, observed, factors)
    weights = sigma2 / factors**2
    ultimates = completed[:, -1]
    n_origin, n_dev = completed.shape

    process = np.zeros(n_origin)
    estimation = np.zeros(n_origin)
    for i in range(n_origin):
        future = np.arange(last[i], n_dev - 1)
        process[i] = ultimates[i] ** 2 * np.sum(weights[future] / completed[i, future])
        estimation[i] = ultimates[i] ** 2 * np.sum(weights[future] / column_sums[future])

    cross = 0.0
    for a in range(n_origin):
        for b in range(a + 1, n_origin):
            shared = np.arange(max(last[a], last[b]), n_dev - 1)
            cross += 2 * ultimates[a] * ultimates[b] * np.sum(weights[shared] / column_sums[shared])

    return MackResult(
        sigma2=sigma2,
        process_variance=float(np.sum(process)),
        estimation_variance=float(np.sum(estimation) + cross),
        per_origin_mse=process + estimation,
    )


def _cumulative(t: Triangle) -> tuple[np.ndarray, np.ndarray]:
    if t.n_origin < 2:
        raise ValidationError(f"Chain-Ladder needs at least two origins, got {t.n_origin}")
    if t.n_dev < 2:
        raise ValidationError("Chain-Ladder needs at least two development lags")
    if t.kind == TriangleKind.INCREMENTAL:
        t = cumulate(t)
    elif not t.has_row_prefixes():
        raise ValidationError("Every row must be observed from the first lag without gaps")
    if np.any(t.last_observed_lag() < 0):
        raise ValidationError("Every origin needs at least one observed amount")
    return np.where(t.observed, t.values, np.nan), t.observed


def _complete(cumulative, observed, factors) -> tuple[np.ndarray, np.ndarray]:
    last = np.where(observed, np.arange(cumulative.shape[1]), -1).max(axis=1)
    completed = cumulative.copy()
    for i, start in enumerate(last):
        for j in range(start, cumulative.shape[1] - 1):
            completed[i, j + 1] = completed[i, j] * factors[j]
    return completed, last


def chain_ladder_to_json(result: ChainLadderResult) -> dict:
    data = {
        "summary": result.summary,
        "factors": result.factors,
        "origins": [
            {"origin": label, "latest": latest, "ultimate": ultimate, "reserve": reserve}
            for label, latest, ultimate, reserve in zip(
                result.origin_labels, result.latest, result.ultimates, result.reserves, strict=True
            )
        ],
        "completed_cumulative": result.cumulative,
    }
    if result.mack is not None:
        data["mack"] = {
            "sigma2": result.mack.sigma2,
            "process_variance": result.mack.process_variance,
            "estimation_variance": result.mack.estimation_variance,
            "per_origin_se": result.mack.per_origin_se,
        }
        for entry, se in zip(data["origins"], result.mack.per_origin_se, strict=True):
            entry["std_error"] = se
    return to_jsonable(data)


def chain_ladder_report(result: ChainLadderResult) -> str:
    lines = ["Chain-Ladder", "  factors: " + " ".join(f"{f:.6f}" for f in result.factors)]
    for name, value in result.summary.items():
        if value is None:
            lines.append(f"  {name:<12} -")
        elif name == "CV":
            lines.append(f"  {name:<12} {value:.4%}")
        else:
            lines.append(f"  {name:<12} {value:,.2f}")
    lines.append(f"  {'origin':<10} {'latest':>16} {'ultimate':>16} {'reserve':>16}")
    for label, latest, ultimate, reserve in zip(
        result.origin_labels, result.latest, result.ultimates, result.reserves, strict=True
    ):
        lines.append(f"  {label:<10} {latest:>16,.2f} {ultimate:>16,.2f} {reserve:>16,.2f}")
    return "\n".join(lines) + "\n"
