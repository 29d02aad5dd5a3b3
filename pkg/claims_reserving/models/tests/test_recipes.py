import numpy as np

from claims_reserving.exceptions import DimensionError
from claims_reserving.kalman import kalman_filter, kalman_smoother
from claims_reserving.models import (
    BSMRecipe,
    CCRecipe,
    FixedRowsVerrallRecipe,
    HertigRecipe,
    VerrallRecipe,
    build_cc,
    build_hertig,
)
from claims_reserving.models.utils import initial_variance, response_cells
from claims_reserving.ssm import validate
from claims_reserving.tests.utils import TestCase, random_runoff
from claims_reserving.triangle import ResponseKind, Sequencing, transform

CATALOG = [
    (HertigRecipe, ResponseKind.LOG_DEV_RATIO, Sequencing.CALENDAR_YEAR, 1),
    (CCRecipe, ResponseKind.LOG_DEV_RATIO, Sequencing.CALENDAR_YEAR, 2),
    (VerrallRecipe, ResponseKind.LOG_INCREMENTAL, Sequencing.CALENDAR_YEAR, 3),
    (BSMRecipe, ResponseKind.LOG_INCREMENTAL, Sequencing.ROW_WISE, 3),
]


class TestCatalog(TestCase):
    def test_response_and_sequencing(self):
        triangle = self.load_triangle("small_5x5")
        for recipe_class, response_kind, sequencing, q in CATALOG:
            recipe = recipe_class()
            series, param_map = recipe.build(triangle)

            self.assertEqual(recipe.response_kind, response_kind)
            self.assertEqual(series.response_kind, response_kind)
            self.assertEqual(series.sequencing, sequencing)
            self.assertEqual(param_map.q, q)
            self.assertEqual(recipe.declared_q, q)
            self.assertEqual(param_map.names[0], "sigma2")

    def test_specs_are_valid(self):
        for n in (3, 5, 8):
            for recipe_class, *_ in CATALOG:
                recipe = recipe_class()
                param_map = recipe.build_for_shape((n, n))
                spec = param_map.evaluate({name: 0.1 for name in param_map.names})

                self.assertTrue(validate(spec).ok, (recipe.name, n, validate(spec).issues))
                self.assertEqual(len(recipe.example_state((n, n))), spec.n_states)
                self.assertEqual(spec.n_times, len(response_cells((n, n), recipe.sequencing)))

    def test_initial_variance(self):
        grid = np.array([[1.0, 2.0], [3.0, np.nan], [2.0, np.nan]])
        # column 0 deviates by -1, 1, 0; column 1 has a single value
        self.assertAlmostEqual(initial_variance(grid), 2 / 3)
        self.assertEqual(initial_variance(np.array([[1.0, np.nan]])), 0.1)
        self.assertEqual(initial_variance(np.array([[1.0], [1.0]])), 1e-4)


class TestLagEffects(TestCase):
    def setUp(self):
        self.triangle = random_runoff(np.random.default_rng(51), 6)

    def test_hertig_effects_are_column_means(self):
        series, param_map = build_hertig(self.triangle)
        spec = param_map.evaluate({"sigma2": 0.02})
        smoothed = kalman_smoother(spec, series)

        grid = transform(self.triangle, ResponseKind.LOG_DEV_RATIO)
        self.assertArrayClose(smoothed.smoothed_mean[-1], np.nanmean(grid, axis=0), rtol=1e-8, atol=1e-8)
        self.assertIn("development", smoothed.components)

    def test_cc_without_drift_is_hertig(self):
        hertig_series, hertig_map = build_hertig(self.triangle)
        cc_series, cc_map = build_cc(self.triangle)

        hertig_spec = hertig_map.evaluate({"sigma2": 0.03})
        cc_spec = cc_map.evaluate({"sigma2": 0.03, "tau2": 0.0})
        hertig_loglik = kalman_filter(hertig_spec, hertig_series).loglik
        self.assertAlmostEqual(kalman_filter(cc_spec, cc_series).loglik, hertig_loglik, delta=1e-6)
        self.assertArrayClose(
            kalman_smoother(cc_spec, cc_series).prediction_grid(),
            kalman_smoother(hertig_spec, hertig_series).prediction_grid(),
            rtol=0,
            atol=1e-6,
        )

        drifting = kalman_filter(cc_map.evaluate({"sigma2": 0.03, "tau2": 0.01}), cc_series)
        self.assertNotAlmostEqual(drifting.loglik, hertig_loglik, places=3)


def two_way_regressors(n_origin, n_dev):
    def regressors(i, j):
        row = np.zeros(n_origin + n_dev - 1)
        row[0] = 1.0
        if i:
            row[i] = 1.0
        if j:
            row[n_origin - 1 + j] = 1.0
        return row

    return regressors


class TestVerrall(TestCase):
    def setUp(self):
        self.triangle = random_runoff(np.random.default_rng(52), 6)
        self.grid = transform(self.triangle, ResponseKind.LOG_INCREMENTAL)

    def test_fixed_rows_without_walks_are_two_way_regression(self):
        series, param_map = FixedRowsVerrallRecipe().build(self.triangle)
        smoothed = kalman_smoother(param_map.evaluate({"sigma2": 0.02, "tau2_row": 0.0, "tau2_col": 0.0}), series)

        n_origin, n_dev = self.grid.shape
        regressors = two_way_regressors(n_origin, n_dev)
        cells = [(i, j) for i in range(n_origin) for j in range(n_dev)]
        observed = [c for c in cells if self.triangle.observed[c]]
        x = np.array([regressors(*c) for c in observed])
        y = np.array([self.grid[c] for c in observed])
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)

        predicted = smoothed.prediction_grid()
        for c in cells:
            if not self.triangle.observed[c]:
                self.assertAlmostEqual(predicted[c], regressors(*c) @ beta, delta=1e-8)
        self.assertArrayClose(smoothed.smoothed_mean[-1], beta, rtol=1e-8, atol=1e-8)

    def test_row_walk_without_variance_predicts_column_means(self):
        series, param_map = VerrallRecipe().build(self.triangle)
        smoothed = kalman_smoother(param_map.evaluate({"sigma2": 0.02, "tau2_row": 0.0, "tau2_col": 0.0}), series)

        column_means = np.nanmean(self.grid, axis=0)
        predicted = smoothed.prediction_grid()
        for i, j in np.argwhere(self.triangle.unobserved):
            self.assertAlmostEqual(predicted[i, j], column_means[j], delta=1e-8)

    def test_row_walk_starts_from_previous_origin(self):
        spec = VerrallRecipe().build_for_shape((4, 4)).evaluate({"sigma2": 0.1, "tau2_row": 0.2, "tau2_col": 0.05})

        # a_1 starts from zero, a_2 from a_1, a_3 from a_2
        self.assertArrayClose(spec.transition[1][1], np.zeros(7))
        self.assertArrayClose(spec.transition[2][2], np.eye(7)[1])
        self.assertArrayClose(spec.transition[3][3], np.eye(7)[2])
        self.assertArrayClose(spec.transition[4], np.eye(7))
        self.assertAlmostEqual(spec.state_cov[2][2, 2], 0.2)
        self.assertAlmostEqual(spec.state_cov[5][2, 2], 0.0)
        self.assertAlmostEqual(spec.state_cov[5][6, 6], 0.05)
        self.assertEqual(list(spec.diffuse), [True, False, False, False, True, True, True])

    def test_diffuse_count_matches_structural_model(self):
        triangle = random_runoff(np.random.default_rng(54), 7)
        for recipe in (VerrallRecipe(), BSMRecipe()):
            series, param_map = recipe.build(triangle)
            filtered = kalman_filter(param_map.evaluate({name: 0.05 for name in param_map.names}), series)
            self.assertEqual(filtered.n_diffuse, 7, recipe.name)

        series, param_map = FixedRowsVerrallRecipe().build(triangle)
        filtered = kalman_filter(param_map.evaluate({name: 0.05 for name in param_map.names}), series)
        self.assertEqual(filtered.n_diffuse, 13)


class TestBSM(TestCase):
    def test_fixed_pattern_predicts_column_means(self):
        triangle = random_runoff(np.random.default_rng(53), 5)
        series, param_map = BSMRecipe().build(triangle)
        smoothed = kalman_smoother(
            param_map.evaluate({"sigma2": 0.02, "tau2_level": 0.0, "tau2_pattern": 0.0}), series
        )

        grid = transform(triangle, ResponseKind.LOG_INCREMENTAL)
        column_means = np.nanmean(grid, axis=0)
        predicted = smoothed.prediction_grid()
        for i, j in np.argwhere(triangle.unobserved):
            self.assertAlmostEqual(predicted[i, j], column_means[j], delta=1e-8)

    def test_needs_two_lags(self):
        with self.assertRaises(DimensionError):
            BSMRecipe().build_for_shape((4, 1))

    def test_period_two(self):
        spec = BSMRecipe().build_for_shape((3, 2)).evaluate({"sigma2": 1.0, "tau2_level": 0.1, "tau2_pattern": 0.1})
        self.assertEqual(spec.n_states, 2)
        self.assertArrayClose(spec.transition[0], [[1.0, 0.0], [0.0, -1.0]])
