from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from claims_reserving.constants import DEFAULT_SEED, DRAW_CHUNK_SIZE
from claims_reserving.exceptions import ValidationError
from claims_reserving.kalman import SmootherOutput, kalman_smoother, smooth_batch
from claims_reserving.simsmooth.utils import covariance_factor, draw_generator
from claims_reserving.ssm import SsmSpec, augment_regression
from claims_reserving.triangle import TransformedSeries
from claims_reserving.utils import get_thread_count


@dataclass(frozen=True, eq=False)
class StateDraws:
    """Draws of the (augmented) state path given all observed data, shape (n_draws, n_times, k)."""

    spec: SsmSpec
    states: np.ndarray

    @property
    def n_draws(self) -> int:
        return self.states.shape[0]

    @property
    def beta(self) -> np.ndarray:
        return self.states[:, -1, list(self.spec.beta_index)]

    @property
    def gamma(self) -> np.ndarray:
        return self.states[:, -1, list(self.spec.gamma_index)]


class MeanCorrectionSampler:
    """Simulation smoother by mean correction.

    Each draw simulates a pseudo data set from the model, smooths it with the
    gains of the real-data filter and returns
    smoothed(real) + simulated state - smoothed(pseudo). Diffuse pre-sample
    states of the pseudo data start from their smoothed values plus a draw
    from their smoothed covariance.

    Draw i only uses the generator `draw_generator(seed, i)`, and draws are
    computed in fixed chunks, so results do not depend on the thread count.
    """

    def __init__(self, smoothed: SmootherOutput):
        self.smoothed = smoothed
        self.filtered = smoothed.filtered
        self.spec = smoothed.spec
        self.series = smoothed.series

        spec = self.spec
        k = spec.n_states
        self._factors = {}
        self._initial_factor = covariance_factor(spec.initial_cov)
        self._diffuse_idx = np.flatnonzero(spec.diffuse)
        self._diffuse_factor = covariance_factor(
            smoothed.initial_cov[np.ix_(self._diffuse_idx, self._diffuse_idx)]
        )
        self._state_factors = tuple(self._factor(q) for q in spec.state_cov)
        self._obs_sd = tuple(np.sqrt(np.clip(h, 0.0, None)) for h in spec.obs_variance)
        self._missing = tuple(np.isnan(y) for y in self.series.observations)
        self._n_elements = int(sum(spec.dims))
        self.n_normals = 2 * k + spec.n_times * k + 2 * self._n_elements

    def _factor(self, cov: np.ndarray) -> np.ndarray:
        key = id(cov)
        if key not in self._factors:
            self._factors[key] = covariance_factor(cov)
        return self._factors[key]

    def normals(self, start: int, stop: int, seed: int | None) -> np.ndarray:
        """Standard normals for draws start..stop-1, one row per draw."""
        return np.stack([draw_generator(seed, i).standard_normal(self.n_normals) for i in range(start, stop)])

    def chunk(self, start: int, stop: int, seed: int | None):
        """State draws (n, k, D) and response draws, a list of (p_t, D) arrays.

        Response draws keep the data at observed elements and add fresh
        observation noise at missing ones.
        """
        spec = self.spec
        k = spec.n_states
        n = spec.n_times
        normals = self.normals(start, stop, seed).T
        width = normals.shape[1]

        offset = 0
        initial_noise = normals[offset : offset + k]
        offset += k
        diffuse_noise = normals[offset : offset + k]
        offset += k

        alpha = spec.initial_mean[:, None] + self._initial_factor @ initial_noise
        if self._diffuse_idx.size:
            d = self._diffuse_idx
            alpha[d] = self.smoothed.initial_mean[d][:, None] + self._diffuse_factor @ diffuse_noise[: d.size]

        simulated = np.empty((n, k, width))
        pseudo = []
        for t in range(n):
            alpha = spec.transition[t] @ alpha + self._state_factors[t] @ normals[offset : offset + k]
            offset += k
            simulated[t] = alpha
            p = spec.dims[t]
            pseudo.append(spec.design[t] @ alpha + self._obs_sd[t][:, None] * normals[offset : offset + p])
            offset += p

        pseudo_means, _ = smooth_batch(self.filtered, pseudo)
        states = self.smoothed.smoothed_mean[:, :, None] + simulated - pseudo_means

        responses = []
        for t in range(n):
            p = spec.dims[t]
            noise = self._obs_sd[t][:, None] * normals[offset : offset + p]
            offset += p
            signal = spec.design[t] @ states[t]
            observed = self.series.observations[t][:, None]
            responses.append(np.where(self._missing[t][:, None], signal + noise, observed))
        return states, responses

    def map_chunks(
        self,
        n_draws: int,
        seed: int | None,
        reducer: Callable[[np.ndarray, list[np.ndarray]], object],
        threads: int | None = None,
    ) -> list:
        if n_draws < 1:
            raise ValidationError(f"n_draws must be at least 1, got {n_draws}")
        bounds = [(s, min(s + DRAW_CHUNK_SIZE, n_draws)) for s in range(0, n_draws, DRAW_CHUNK_SIZE)]

        def work(bound):
            return reducer(*self.chunk(bound[0], bound[1], seed))

        with ThreadPoolExecutor(max_workers=get_thread_count(threads)) as pool:
            return list(pool.map(work, bounds))

    def response_grids(self, responses: list[np.ndarray]) -> np.ndarray:
        """Scatter response draws onto (D, n_origin, n_dev) grids."""
        width = responses[0].shape[1] if responses else 0
        grid = np.full((width, *self.series.shape), np.nan)
        for cells, values in zip(self.series.cells, responses, strict=True):
            if not cells:
                continue
            rows, cols = np.array(cells).T
            grid[:, rows, cols] = values.T
        return grid


def draw_states(
    spec: SsmSpec,
    series: TransformedSeries,
    n_draws: int,
    seed: int | None = DEFAULT_SEED,
    threads: int | None = None,
) -> StateDraws:
    """Joint draws of the state path (with beta and gamma) given the observed data."""
    sampler = MeanCorrectionSampler(kalman_smoother(spec, series))
    chunks = sampler.map_chunks(n_draws, seed, lambda states, _: states, threads)
    return StateDraws(sampler.spec, np.concatenate(chunks, axis=2).transpose(2, 0, 1))


def draw_missing_responses(
    spec: SsmSpec,
    series: TransformedSeries,
    n_draws: int,
    seed: int | None = DEFAULT_SEED,
    threads: int | None = None,
) -> np.ndarray:
    """Response grids (n_draws, n_origin, n_dev): data where observed, draws elsewhere."""
    sampler = MeanCorrectionSampler(kalman_smoother(spec, series))
    chunks = sampler.map_chunks(n_draws, seed, lambda _, responses: sampler.response_grids(responses), threads)
    return np.concatenate(chunks, axis=0)


def simulate_responses(
    spec: SsmSpec, initial_state: np.ndarray, rng: np.random.Generator
) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """One unconditional path from the model, starting from a fixed pre-sample state.

    Returns the response vectors per time and the (n, k) state path.
    """
    spec = augment_regression(spec)
    initial_state = np.asarray(initial_state, dtype=float)
    if initial_state.shape != (spec.n_states,):
        raise ValidationError(f"Initial state needs {spec.n_states} entries, got {initial_state.shape}")

    alpha = initial_state + np.where(spec.diffuse, 0.0, covariance_factor(spec.initial_cov) @ rng.standard_normal(spec.n_states))
    states = np.empty((spec.n_times, spec.n_states))
    responses = []
    for t in range(spec.n_times):
        alpha = spec.transition[t] @ alpha + covariance_factor(spec.state_cov[t]) @ rng.standard_normal(spec.n_states)
        states[t] = alpha
        h = np.clip(spec.obs_variance[t], 0.0, None)
        responses.append(spec.design[t] @ alpha + np.sqrt(h) * rng.standard_normal(len(h)))
    return tuple(responses), states
