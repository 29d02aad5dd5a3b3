import numpy as np

from claims_reserving.exceptions import DimensionError, UnderIdentifiedError
from claims_reserving.kalman import StepKind, kalman_filter, kalman_smoother, replay_filter
from claims_reserving.kalman.constants import LOG_2PI
from claims_reserving.kalman.tests.utils import BIG_KAPPA, dense_moments, local_level, random_series, random_spec
from claims_reserving.ssm import SsmSpec
from claims_reserving.tests.utils import TestCase
from claims_reserving.triangle import TransformedSeries


class TestKalmanFilter(TestCase):
    def test_loglik_matches_joint_gaussian(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            spec = random_spec(rng)
            series = random_series(rng, spec)
            if series.n_observed == 0:
                continue
            filtered = kalman_filter(spec, series)
            expected = dense_moments(spec, series)

            self.assertAlmostEqual(filtered.loglik, expected.loglik, delta=1e-8 * max(1.0, abs(expected.loglik)))
            self.assertEqual(filtered.n_obs, series.n_observed)
            self.assertEqual(filtered.n_diffuse, 0)

    def test_diffuse_loglik_matches_large_prior_variance(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            spec = random_spec(rng, diffuse=True)
            series = random_series(rng, spec, missing_rate=0.1)
            filtered = kalman_filter(spec, series)
            expected = dense_moments(spec, series, kappa=BIG_KAPPA)

            diffuse_steps = [s for s in filtered.steps if s.kind == StepKind.DIFFUSE]
            self.assertEqual(len(diffuse_steps), filtered.n_diffuse)
            self.assertEqual(filtered.n_diffuse, spec.n_diffuse)
            # the diffuse steps carry no density term
            adjusted = (
                expected.loglik
                + 0.5 * filtered.n_diffuse * np.log(BIG_KAPPA)
                + 0.5 * sum(LOG_2PI + np.log(s.f_inf) for s in diffuse_steps)
            )
            self.assertAlmostEqual(filtered.loglik, adjusted, delta=1e-4 * max(1.0, abs(adjusted)))

    def test_local_level_by_hand(self):
        spec = local_level(2, obs_variance=1.0, level_variance=0.5)
        filtered = kalman_filter(spec, TransformedSeries.from_vectors([[1.0], [2.0]]))

        self.assertEqual(filtered.n_diffuse, 1)
        self.assertEqual(filtered.n_eff, 1)
        self.assertEqual([s.kind for s in filtered.steps], [StepKind.DIFFUSE, StepKind.REGULAR])
        # after the first observation the level is 1 with variance 1; F = 1 + 0.5 + 1
        self.assertAlmostEqual(filtered.filtered_mean[0, 0], 1.0)
        self.assertAlmostEqual(filtered.filtered_cov[0, 0, 0], 1.0)
        self.assertAlmostEqual(filtered.loglik, -0.5 * (LOG_2PI + np.log(2.5) + 1 / 2.5))
        self.assertArrayClose(filtered.standardized_residuals(), [1 / np.sqrt(2.5)])

    def test_store_false_keeps_likelihood(self):
        rng = np.random.default_rng(13)
        spec = random_spec(rng, diffuse=True)
        series = random_series(rng, spec, missing_rate=0.0)
        full = kalman_filter(spec, series)
        light = kalman_filter(spec, series, store=False)

        self.assertEqual(light.loglik, full.loglik)
        self.assertFalse(light.has_moments)
        self.assertEqual(light.steps, ())

    def test_missing_elements_skipped(self):
        spec = local_level(3, obs_variance=1.0, level_variance=0.5)
        with_gap = kalman_filter(spec, TransformedSeries.from_vectors([[1.0], [np.nan], [2.0]]))

        # a skipped time only adds one more level step to the variance
        self.assertEqual(with_gap.n_obs, 2)
        self.assertAlmostEqual(with_gap.loglik, -0.5 * (LOG_2PI + np.log(3.0) + 1 / 3.0))

    def test_unidentified(self):
        spec = local_level(3, obs_variance=1.0, level_variance=0.5)
        with self.assertRaises(UnderIdentifiedError):
            kalman_filter(spec, TransformedSeries.from_vectors([[np.nan]] * 3))

    def test_degenerate_flag(self):
        spec = local_level(3, obs_variance=0.0, level_variance=0.0)
        filtered = kalman_filter(spec, TransformedSeries.from_vectors([[1.0], [1.0], [1.0]]))

        self.assertTrue(filtered.degenerate)
        self.assertEqual(filtered.loglik, 0.0)

    def test_dimension_mismatch(self):
        spec = local_level(3, obs_variance=1.0, level_variance=0.5)
        with self.assertRaises(DimensionError):
            kalman_filter(spec, TransformedSeries.from_vectors([[1.0], [2.0]]))
        with self.assertRaises(DimensionError):
            kalman_filter(spec, TransformedSeries.from_vectors([[1.0], [2.0, 3.0], [1.0]]))

    def test_replay_matches_filter(self):
        rng = np.random.default_rng(14)
        spec = random_spec(rng, diffuse=True)
        series = random_series(rng, spec)
        filtered = kalman_filter(spec, series)

        columns = [np.nan_to_num(y)[:, None] for y in series.observations]
        predicted, innovations = replay_filter(filtered, columns)
        self.assertArrayClose(predicted[:, :, 0], filtered.predicted_mean, rtol=1e-10, atol=1e-12)
        self.assertArrayClose(innovations[:, 0], filtered.innovations, rtol=1e-10, atol=1e-12)


class TestElementHandling(TestCase):
    def test_loglik_invariant_to_element_order(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            spec = random_spec(rng)
            series = random_series(rng, spec)
            orders = [rng.permutation(dim) for dim in spec.dims]
            shuffled_spec = spec.replace(
                design=tuple(z[order] for z, order in zip(spec.design, orders, strict=True)),
                obs_variance=tuple(h[order] for h, order in zip(spec.obs_variance, orders, strict=True)),
            )
            shuffled = TransformedSeries.from_vectors(
                [y[order] for y, order in zip(series.observations, orders, strict=True)]
            )

            expected = kalman_filter(spec, series).loglik
            self.assertAlmostEqual(
                kalman_filter(shuffled_spec, shuffled).loglik, expected, delta=1e-10 * max(1.0, abs(expected))
            )

    def test_missing_element_same_as_removed_element(self):
        rng = np.random.default_rng(16)
        checked = 0
        while checked < 10:
            spec = random_spec(rng, diffuse=bool(checked % 2))
            series = random_series(rng, spec, missing_rate=0.0)
            pairs = [t for t, dim in enumerate(spec.dims) if dim == 2]
            if not pairs:
                continue
            t = pairs[0]
            e = int(rng.integers(0, 2))

            observations = [y.copy() for y in series.observations]
            observations[t][e] = np.nan
            with_gap = TransformedSeries.from_vectors(observations)

            design = list(spec.design)
            obs_variance = list(spec.obs_variance)
            design[t] = np.delete(design[t], e, axis=0)
            obs_variance[t] = np.delete(obs_variance[t], e)
            observations[t] = np.delete(observations[t], e)
            removed_spec = spec.replace(design=tuple(design), obs_variance=tuple(obs_variance))
            removed = TransformedSeries.from_vectors(observations)

            try:
                gap_filter = kalman_filter(spec, with_gap)
            except UnderIdentifiedError:
                continue
            removed_filter = kalman_filter(removed_spec, removed)
            self.assertAlmostEqual(
                gap_filter.loglik, removed_filter.loglik, delta=1e-10 * max(1.0, abs(removed_filter.loglik))
            )
            self.assertEqual(gap_filter.n_obs, removed_filter.n_obs)

            gap_smoothed = kalman_smoother(spec, with_gap)
            removed_smoothed = kalman_smoother(removed_spec, removed)
            self.assertArrayClose(gap_smoothed.smoothed_mean, removed_smoothed.smoothed_mean, rtol=1e-10, atol=1e-10)
            self.assertArrayClose(gap_smoothed.smoothed_cov, removed_smoothed.smoothed_cov, rtol=1e-10, atol=1e-10)
            checked += 1


class TestDiffuseScale(TestCase):
    def spec(self, scale: float) -> SsmSpec:
        base = SsmSpec.time_invariant(
            6,
            design=[[1.0, 0.7], [0.4, 1.0]],
            obs_variance=[0.5, 0.8],
            transition=[[1.0, 0.1], [0.0, 1.0]],
            state_cov=0.1 * np.eye(2),
            initial_mean=[0.0, 0.0],
            initial_cov=np.zeros((2, 2)),
            diffuse=[True, True],
        )
        first = scale * np.array([[1.0, 0.3], [0.2, 1.0]])
        return base.replace(transition=(first,) + base.transition[1:])

    def test_collapse_relative_to_diffuse_magnitude(self):
        rng = np.random.default_rng(21)
        series = TransformedSeries.from_vectors(rng.normal(0.0, 2.0, size=(6, 2)))
        reference = kalman_filter(self.spec(1.0), series)

        for scale in (1e3, 1e6):
            filtered = kalman_filter(self.spec(scale), series)
            self.assertEqual(filtered.n_diffuse, 2, scale)
            self.assertEqual(filtered.steps[2].kind, StepKind.REGULAR)
            self.assertAlmostEqual(filtered.loglik, reference.loglik, delta=1e-6 * abs(reference.loglik))
