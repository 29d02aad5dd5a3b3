from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import multivariate_normal

from claims_reserving.kalman.constants import LOG_2PI
from claims_reserving.ssm import ComponentDef, SsmSpec, augment_regression
from claims_reserving.triangle import TransformedSeries

BIG_KAPPA = 1e8


@dataclass
class DenseMoments:
    loglik: float
    smoothed_mean: np.ndarray
    smoothed_cov: np.ndarray
    initial_mean: np.ndarray
    missing: dict[tuple[int, int], tuple[float, float]]


def random_spec(rng: np.random.Generator, diffuse: bool = False, n_times: int | None = None) -> SsmSpec:
    """Time-varying spec with 1-3 states and 1-2 responses per time point."""
    k = int(rng.integers(1, 4))
    n = n_times or int(rng.integers(5, 10))
    design, obs_variance, transition, state_cov = [], [], [], []
    for _ in range(n):
        p = int(rng.integers(1, 3))
        design.append(rng.normal(size=(p, k)))
        obs_variance.append(rng.uniform(0.2, 1.5, size=p))
        transition.append(rng.uniform(0.5, 1.0) * np.eye(k) + 0.15 * rng.normal(size=(k, k)))
        b = 0.5 * rng.normal(size=(k, k))
        state_cov.append(b @ b.T)

    flags = np.zeros(k, dtype=bool)
    if diffuse:
        flags = rng.random(k) < 0.7
        flags[0] = True
    b = rng.normal(size=(k, k))
    initial_cov = b @ b.T + np.eye(k)
    initial_cov[flags, :] = 0
    initial_cov[:, flags] = 0
    return SsmSpec(
        design=tuple(design),
        obs_variance=tuple(obs_variance),
        transition=tuple(transition),
        state_cov=tuple(state_cov),
        initial_mean=np.where(flags, 0.0, rng.normal(size=k)),
        initial_cov=initial_cov,
        diffuse=flags,
    )


def random_series(rng: np.random.Generator, spec: SsmSpec, missing_rate: float = 0.15) -> TransformedSeries:
    observations = []
    for dim in spec.dims:
        y = rng.normal(0.0, 2.0, size=dim)
        y[rng.random(dim) < missing_rate] = np.nan
        observations.append(y)
    return TransformedSeries.from_vectors(observations)


def dense_moments(spec: SsmSpec, series: TransformedSeries, kappa: float | None = None) -> DenseMoments:
    """Moments from the joint Gaussian of all states and observations.

    Diffuse elements get variance `kappa`; without it the model must have no
    diffuse elements.
    """
    spec = augment_regression(spec)
    k = spec.n_states
    n = spec.n_times
    size = k * (n + 1)
    identity = np.eye(k)

    initial_cov = spec.initial_cov + (kappa or 0.0) * np.diag(spec.diffuse.astype(float))
    sigma = block_diag(initial_cov, *spec.state_cov)
    mu = np.concatenate([spec.initial_mean, np.zeros(k * n)])

    # state maps: a_t = maps[t] @ (a_(-1), eta_0, ..., eta_(n-1))
    initial_map = np.zeros((k, size))
    initial_map[:, :k] = identity
    maps = []
    current = initial_map
    for t in range(n):
        current = spec.transition[t] @ current
        current[:, k * (t + 1) : k * (t + 2)] += identity
        maps.append(current.copy())

    rows, values, noise = [], [], []
    missing_rows = {}
    for t, y in enumerate(series.observations):
        for e, value in enumerate(y):
            row = spec.design[t][e] @ maps[t]
            if np.isnan(value):
                missing_rows[(t, e)] = (row, spec.obs_variance[t][e])
            else:
                rows.append(row)
                values.append(value)
                noise.append(spec.obs_variance[t][e])

    g = np.array(rows).reshape(len(rows), size)
    values = np.array(values)
    mean_y = g @ mu
    cov_y = g @ sigma @ g.T + np.diag(noise)
    gain = np.linalg.solve(cov_y, g @ sigma).T
    post_mean = mu + gain @ (values - mean_y)
    post_cov = sigma - gain @ g @ sigma

    if kappa is None:
        loglik = float(multivariate_normal(mean_y, cov_y).logpdf(values))
    else:
        _, logdet = np.linalg.slogdet(cov_y)
        resid = values - mean_y
        loglik = float(-0.5 * (len(values) * LOG_2PI + logdet + resid @ np.linalg.solve(cov_y, resid)))

    return DenseMoments(
        loglik=loglik,
        smoothed_mean=np.array([m @ post_mean for m in maps]),
        smoothed_cov=np.array([m @ post_cov @ m.T for m in maps]),
        initial_mean=initial_map @ post_mean,
        missing={
            key: (float(row @ post_mean), float(row @ post_cov @ row + h)) for key, (row, h) in missing_rows.items()
        },
    )


def local_level(n_times: int = 4, obs_variance: float = 1.0, level_variance: float = 0.5) -> SsmSpec:
    return SsmSpec.time_invariant(
        n_times,
        design=[[1.0]],
        obs_variance=[obs_variance],
        transition=[[1.0]],
        state_cov=[[level_variance]],
        initial_mean=[0.0],
        initial_cov=[[0.0]],
        diffuse=[True],
        components=(ComponentDef("level", [[1.0]]),),
    )
