from dataclasses import dataclass, field

import numpy as np

from claims_reserving.kalman.constants import StepKind
from claims_reserving.kalman.filter import FilterOutput, kalman_filter, replay_filter
from claims_reserving.ssm import SsmSpec
from claims_reserving.triangle import TransformedSeries


@dataclass(frozen=True)
class MissingPrediction:
    time: int
    element: int
    cell: tuple[int, int]
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class ComponentPath:
    name: str
    mean: np.ndarray
    variance: np.ndarray


@dataclass(frozen=True, eq=False)
class SmootherOutput:
    """Full-sample state moments and response predictions.

    `signal_mean[t]` / `signal_var[t]` describe Z_t a_t for every element of
    time t; predictions of missing responses add the observation variance.
    `initial_mean` / `initial_cov` belong to the pre-sample state.
    """

    spec: SsmSpec
    series: TransformedSeries
    filtered: FilterOutput
    smoothed_mean: np.ndarray
    smoothed_cov: np.ndarray
    initial_mean: np.ndarray
    initial_cov: np.ndarray
    signal_mean: tuple[np.ndarray, ...]
    signal_var: tuple[np.ndarray, ...]
    components: dict[str, ComponentPath] = field(default_factory=dict)

    @property
    def beta(self) -> np.ndarray:
        return self.smoothed_mean[-1, list(self.spec.beta_index)]

    @property
    def beta_cov(self) -> np.ndarray:
        idx = list(self.spec.beta_index)
        return self.smoothed_cov[-1][np.ix_(idx, idx)]

    @property
    def gamma(self) -> np.ndarray:
        return self.smoothed_mean[-1, list(self.spec.gamma_index)]

    @property
    def gamma_cov(self) -> np.ndarray:
        idx = list(self.spec.gamma_index)
        return self.smoothed_cov[-1][np.ix_(idx, idx)]

    def missing_predictions(self) -> list[MissingPrediction]:
        predictions = []
        for t, y in enumerate(self.series.observations):
            for e in np.flatnonzero(np.isnan(y)):
                predictions.append(
                    MissingPrediction(
                        time=t,
                        element=int(e),
                        cell=self.series.cells[t][e],
                        mean=float(self.signal_mean[t][e]),
                        variance=float(self.signal_var[t][e] + self.spec.obs_variance[t][e]),
                    )
                )
        return predictions

    def prediction_grid(self) -> np.ndarray:
        """Observed responses with smoothed predictions in the missing cells."""
        vectors = [np.where(np.isnan(y), m, y) for y, m in zip(self.series.observations, self.signal_mean, strict=True)]
        return self.series.to_grid(vectors)

    def prediction_variance_grid(self) -> np.ndarray:
        vectors = [
            np.where(np.isnan(y), s + h, 0.0)
            for y, s, h in zip(self.series.observations, self.signal_var, self.spec.obs_variance, strict=True)
        ]
        return self.series.to_grid(vectors)


def kalman_smoother(
    spec: SsmSpec, series: TransformedSeries, filtered: FilterOutput | None = None
) -> SmootherOutput:
    """Exact diffuse fixed-interval smoother."""
    if filtered is None or not filtered.has_moments:
        filtered = kalman_filter(spec, series)
    spec = filtered.spec

    innovations = filtered.innovations.reshape(-1, 1)
    predicted = filtered.predicted_mean[:, :, None]
    means, covs, initial_mean, initial_cov = backward_pass(filtered, predicted, innovations, with_cov=True)
    smoothed_mean = means[:, :, 0]

    signal_mean = []
    signal_var = []
    for t, design in enumerate(spec.design):
        signal_mean.append(design @ smoothed_mean[t])
        signal_var.append(np.einsum("ij,jk,ik->i", design, covs[t], design))

    components = {}
    for component in spec.components:
        selection = component.selection
        mean = smoothed_mean @ selection.T
        variance = np.einsum("ij,tjk,ik->ti", selection, covs, selection)
        components[component.name] = ComponentPath(component.name, mean, variance)

    return SmootherOutput(
        spec=spec,
        series=series,
        filtered=filtered,
        smoothed_mean=smoothed_mean,
        smoothed_cov=covs,
        initial_mean=initial_mean[:, 0],
        initial_cov=initial_cov,
        signal_mean=tuple(signal_mean),
        signal_var=tuple(signal_var),
        components=components,
    )


def smooth_batch(filtered: FilterOutput, observations, initial: np.ndarray | None = None):
    """Smoothed state means for many data sets sharing one missing pattern.

    Returns (n, k, D) means and the (k, D) pre-sample means.
    """
    predicted, innovations = replay_filter(filtered, observations, initial)
    means, _, initial_mean, _ = backward_pass(filtered, predicted, innovations, initial=initial, with_cov=False)
    return means, initial_mean


def backward_pass(
    filtered: FilterOutput,
    predicted: np.ndarray,
    innovations: np.ndarray,
    initial: np.ndarray | None = None,
    with_cov: bool = True,
):
    """Backward recursions of the exact diffuse smoother.

    r0/N0 act on the finite part of the covariance, r1/N1/N2 on the diffuse
    part. Means are carried for D data columns at once; the covariance
    recursions do not depend on the data.
    """
    spec = filtered.spec
    n = spec.n_times
    k = spec.n_states
    width = predicted.shape[2]
    identity = np.eye(k)

    r0 = np.zeros((k, width))
    r1 = np.zeros((k, width))
    n0 = np.zeros((k, k))
    n1 = np.zeros((k, k))
    n2 = np.zeros((k, k))
    means = np.empty((n, k, width))
    covs = np.empty((n, k, k)) if with_cov else None

    for t in reversed(range(n)):
        start, stop = filtered.step_ranges[t]
        for idx in reversed(range(start, stop)):
            step = filtered.steps[idx]
            z = step.z
            v = innovations[idx]
            if step.kind == StepKind.DIFFUSE:
                k0, k1 = step.gain_inf, step.gain
                r1 = np.outer(z, v) / step.f_inf + r1 - np.outer(z, k0 @ r1) - np.outer(z, k1 @ r0)
                r0 = r0 - np.outer(z, k0 @ r0)
                if with_cov:
                    l0 = identity - np.outer(k0, z)
                    l1 = -np.outer(k1, z)
                    zz = np.outer(z, z)
                    cross = l0.T @ n1 @ l1
                    n2 = (
                        -zz * step.f_star / step.f_inf**2
                        + l0.T @ n2 @ l0
                        + cross
                        + cross.T
                        + l1.T @ n0 @ l1
                    )
                    n1 = zz / step.f_inf + l0.T @ n1 @ l0 + l1.T @ n0 @ l0
                    n0 = l0.T @ n0 @ l0
            elif step.kind == StepKind.REGULAR:
                gain = step.gain
                r0 = np.outer(z, v) / step.f_star + r0 - np.outer(z, gain @ r0)
                if with_cov:
                    l = identity - np.outer(gain, z)
                    n0 = np.outer(z, z) / step.f_star + l.T @ n0 @ l
                    n1 = n1 @ l

        p_star = filtered.predicted_cov[t]
        p_inf = filtered.predicted_diffuse_cov[t]
        means[t] = predicted[t] + p_star @ r0 + p_inf @ r1
        if with_cov:
            covs[t] = _smoothed_cov(p_star, p_inf, n0, n1, n2)

        transition = spec.transition[t]
        r0 = transition.T @ r0
        r1 = transition.T @ r1
        if with_cov:
            n0 = transition.T @ n0 @ transition
            n1 = transition.T @ n1 @ transition
            n2 = transition.T @ n2 @ transition

    if initial is None:
        initial = np.repeat(spec.initial_mean[:, None], width, axis=1)
    p_star = spec.initial_cov
    p_inf = np.diag(spec.diffuse.astype(float))
    initial_mean = initial + p_star @ r0 + p_inf @ r1
    initial_cov = _smoothed_cov(p_star, p_inf, n0, n1, n2) if with_cov else None
    return means, covs, initial_mean, initial_cov


def _smoothed_cov(p_star, p_inf, n0, n1, n2) -> np.ndarray:
    cross = p_inf @ n1 @ p_star
    v = p_star - p_star @ n0 @ p_star - cross.T - cross - p_inf @ n2 @ p_inf
    return (v + v.T) / 2
