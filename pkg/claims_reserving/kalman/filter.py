from dataclasses import dataclass

import numpy as np

from claims_reserving.exceptions import DimensionError, FilterError, UnderIdentifiedError
from claims_reserving.kalman.constants import (
    COLLAPSE_TOLERANCE,
    DEGENERATE_VARIANCE,
    DIFFUSE_TOLERANCE,
    LOG_2PI,
    StepKind,
)
from claims_reserving.ssm import SsmSpec, augment_regression
from claims_reserving.triangle import TransformedSeries


@dataclass(frozen=True, eq=False)
class FilterStep:
    """One scalar measurement update.

    For diffuse steps `gain_inf` is K0 = P_inf z / F_inf and `gain` is K1;
    for regular steps `gain` is P_star z / F_star.
    """

    time: int
    element: int
    z: np.ndarray
    kind: StepKind
    innovation: float
    f_star: float
    f_inf: float
    gain: np.ndarray | None
    gain_inf: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class FilterOutput:
    spec: SsmSpec
    series: TransformedSeries
    loglik: float
    n_obs: int
    n_diffuse: int
    degenerate: bool
    steps: tuple[FilterStep, ...] = ()
    step_ranges: tuple[tuple[int, int], ...] = ()
    predicted_mean: np.ndarray | None = None
    predicted_cov: np.ndarray | None = None
    predicted_diffuse_cov: np.ndarray | None = None
    filtered_mean: np.ndarray | None = None
    filtered_cov: np.ndarray | None = None
    filtered_diffuse_cov: np.ndarray | None = None

    @property
    def n_eff(self) -> int:
        return self.n_obs - self.n_diffuse

    @property
    def has_moments(self) -> bool:
        return self.predicted_mean is not None

    @property
    def innovations(self) -> np.ndarray:
        return np.array([s.innovation for s in self.steps])

    @property
    def innovation_variances(self) -> np.ndarray:
        return np.array([s.f_inf if s.kind == StepKind.DIFFUSE else s.f_star for s in self.steps])

    @property
    def diffuse_flags(self) -> np.ndarray:
        return np.array([s.kind == StepKind.DIFFUSE for s in self.steps], dtype=bool)

    def standardized_residuals(self) -> np.ndarray:
        regular = [s for s in self.steps if s.kind == StepKind.REGULAR]
        return np.array([s.innovation / np.sqrt(s.f_star) for s in regular])


def kalman_filter(spec: SsmSpec, series: TransformedSeries, store: bool = True) -> FilterOutput:
    """Exact diffuse Kalman filter, processing observation vectors one element at a time.

    The log-likelihood is the diffuse (marginal) likelihood: innovations
    absorbed by diffuse directions contribute no density term. With
    `store=False` only the likelihood and counts are kept.
    """
    spec = augment_regression(spec)
    check_dimensions(spec, series)

    k = spec.n_states
    n = spec.n_times
    a = spec.initial_mean.astype(float).copy()
    p_star = spec.initial_cov.astype(float).copy()
    p_inf = np.diag(spec.diffuse.astype(float))
    in_diffuse = bool(spec.diffuse.any())
    diffuse_scale = 1.0

    loglik = 0.0
    n_obs = 0
    n_diffuse = 0
    degenerate = False
    steps = []
    step_ranges = []
    if store:
        predicted_mean = np.empty((n, k))
        predicted_cov = np.empty((n, k, k))
        predicted_diffuse_cov = np.zeros((n, k, k))
        filtered_mean = np.empty((n, k))
        filtered_cov = np.empty((n, k, k))
        filtered_diffuse_cov = np.zeros((n, k, k))

    for t in range(n):
        transition = spec.transition[t]
        a = transition @ a
        p_star = transition @ p_star @ transition.T + spec.state_cov[t]
        p_star = (p_star + p_star.T) / 2
        if in_diffuse:
            p_inf = transition @ p_inf @ transition.T
            diffuse_scale = max(diffuse_scale, float(np.abs(p_inf).max()))

        if store:
            predicted_mean[t] = a
            predicted_cov[t] = p_star
            if in_diffuse:
                predicted_diffuse_cov[t] = p_inf

        y = series.observations[t]
        design = spec.design[t]
        obs_variance = spec.obs_variance[t]
        first_step = len(steps)
        for e in range(len(y)):
            if np.isnan(y[e]):
                continue
            n_obs += 1
            z = design[e]
            v = float(y[e] - z @ a)
            m_star = p_star @ z
            f_star = float(z @ m_star + obs_variance[e])
            m_inf = p_inf @ z if in_diffuse else None
            f_inf = float(z @ m_inf) if in_diffuse else 0.0
            if not (np.isfinite(f_star) and np.isfinite(f_inf) and np.isfinite(v)):
                raise FilterError(
                    f"Non-finite innovation or variance at time {t}, element {e}", time=t, element=e
                )

            if in_diffuse and f_inf > DIFFUSE_TOLERANCE * diffuse_scale * max(1.0, float(z @ z)):
                k0 = m_inf / f_inf
                k1 = (m_star - k0 * f_star) / f_inf
                a = a + k0 * v
                p_star = p_star - np.outer(k0, m_star) - np.outer(m_star, k0) + np.outer(k0, k0) * f_star
                p_star = (p_star + p_star.T) / 2
                p_inf = p_inf - np.outer(k0, m_inf)
                p_inf = (p_inf + p_inf.T) / 2
                n_diffuse += 1
                if store:
                    steps.append(FilterStep(t, e, z, StepKind.DIFFUSE, v, f_star, f_inf, k1, k0))
                if np.abs(p_inf).max() <= COLLAPSE_TOLERANCE * diffuse_scale:
                    p_inf = np.zeros((k, k))
                    in_diffuse = False
            elif f_star > DEGENERATE_VARIANCE:
                gain = m_star / f_star
                a = a + gain * v
                p_star = p_star - np.outer(gain, m_star)
                p_star = (p_star + p_star.T) / 2
                loglik -= 0.5 * (LOG_2PI + np.log(f_star) + v * v / f_star)
                if store:
                    steps.append(FilterStep(t, e, z, StepKind.REGULAR, v, f_star, f_inf, gain))
            else:
                degenerate = True
                if store:
                    steps.append(FilterStep(t, e, z, StepKind.DEGENERATE, v, f_star, f_inf, None))

        step_ranges.append((first_step, len(steps)))
        if store:
            filtered_mean[t] = a
            filtered_cov[t] = p_star
            if in_diffuse:
                filtered_diffuse_cov[t] = p_inf

    if in_diffuse:
        rank = int(np.linalg.matrix_rank(p_inf, tol=COLLAPSE_TOLERANCE * diffuse_scale))
        raise UnderIdentifiedError(
            f"The data do not identify the model: {rank} diffuse direction(s) remain after the last "
            f"observation ({n_diffuse} of {spec.n_diffuse} absorbed)",
            remaining=rank,
        )

    if not store:
        return FilterOutput(spec, series, float(loglik), n_obs, n_diffuse, degenerate)

    return FilterOutput(
        spec=spec,
        series=series,
        loglik=float(loglik),
        n_obs=n_obs,
        n_diffuse=n_diffuse,
        degenerate=degenerate,
        steps=tuple(steps),
        step_ranges=tuple(step_ranges),
        predicted_mean=predicted_mean,
        predicted_cov=predicted_cov,
        predicted_diffuse_cov=predicted_diffuse_cov,
        filtered_mean=filtered_mean,
        filtered_cov=filtered_cov,
        filtered_diffuse_cov=filtered_diffuse_cov,
    )


def replay_filter(filtered: FilterOutput, observations, initial: np.ndarray | None = None):
    """Run the filter mean recursions for many data sets at once.

    Gains depend only on the model and the missing pattern, so the ones kept
    in `filtered` apply to any data with the same pattern. `observations[t]`
    has shape (p_t, D). Returns predicted means (n, k, D) and innovations
    (n_steps, D).
    """
    _require_moments(filtered)
    spec = filtered.spec
    width = np.asarray(observations[0]).shape[-1] if spec.n_times else 1
    if initial is None:
        initial = np.repeat(spec.initial_mean[:, None], width, axis=1)

    a = np.array(initial, dtype=float)
    predicted = np.empty((spec.n_times, spec.n_states, a.shape[1]))
    innovations = np.empty((len(filtered.steps), a.shape[1]))
    for t in range(spec.n_times):
        a = spec.transition[t] @ a
        predicted[t] = a
        y = observations[t]
        start, stop = filtered.step_ranges[t]
        for idx in range(start, stop):
            step = filtered.steps[idx]
            v = y[step.element] - step.z @ a
            innovations[idx] = v
            if step.kind == StepKind.DIFFUSE:
                a = a + np.outer(step.gain_inf, v)
            elif step.kind == StepKind.REGULAR:
                a = a + np.outer(step.gain, v)
    return predicted, innovations


def check_dimensions(spec: SsmSpec, series: TransformedSeries):
    if spec.n_times != series.n_times:
        raise DimensionError(f"Model covers {spec.n_times} time points, series has {series.n_times}")
    for t, (p_spec, p_series) in enumerate(zip(spec.dims, series.dims, strict=True)):
        if p_spec != p_series:
            raise DimensionError(f"t={t}: model expects {p_spec} responses, series has {p_series}", time=t)


def _require_moments(filtered: FilterOutput):
    if not filtered.has_moments:
        raise ValueError("Filter was run with store=False; rerun with store=True")
