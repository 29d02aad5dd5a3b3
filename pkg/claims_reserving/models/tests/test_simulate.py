import os
import unittest

import numpy as np

from claims_reserving.constants import SLOW_TESTS_ENV
from claims_reserving.estimation import compare, fit
from claims_reserving.exceptions import SimulationError
from claims_reserving.models import get_recipe, list_models, simulate_triangle, to_incremental
from claims_reserving.simsmooth import plug_in_reserve, reserve_distribution
from claims_reserving.tests.utils import TestCase
from claims_reserving.triangle import ResponseKind, reserve_sum, validate_runoff

PARAMS = {
    "Hertig": {"sigma2": 0.0025},
    "CC": {"sigma2": 0.0025, "tau2": 0.001},
    "Verrall": {"sigma2": 0.02, "tau2_row": 0.02, "tau2_col": 0.001},
    "BSM": {"sigma2": 0.02, "tau2_level": 0.002, "tau2_pattern": 0.001},
}

# models sharing a response variable, whose BIC values can be ranked together
RESPONSE_GROUPS = {
    ResponseKind.LOG_DEV_RATIO: ("Hertig", "CC"),
    ResponseKind.LOG_INCREMENTAL: ("Verrall", "BSM"),
}


class TestSimulateTriangle(TestCase):
    def test_complete_runoff_triangle(self):
        for name, params in PARAMS.items():
            triangle = simulate_triangle(name, params, (6, 6), seed=3)

            self.assertEqual(triangle.shape, (6, 6))
            self.assertTrue(np.all(np.isfinite(triangle.values)), name)
            self.assertTrue(validate_runoff(triangle).is_regular)
            self.assertEqual(triangle.n_observed, 21)

    def test_simulated_triangles_build_for_every_recipe(self):
        for name, params in PARAMS.items():
            for seed in range(10):
                triangle = simulate_triangle(name, params, (10, 10), seed=seed)
                self.assertTrue(np.all(triangle.values > 0), (name, seed))
                self.assertGreater(reserve_sum(triangle), 0)
                for other in list_models():
                    series, _ = get_recipe(other).build(triangle)
                    self.assertEqual(series.n_observed, 55, (name, seed, other))

    def test_redraws_exhausted(self):
        with self.assertRaises(SimulationError) as cm:
            simulate_triangle("Hertig", {"sigma2": 100.0}, (6, 6), seed=2, max_attempts=3)
        self.assertEqual(cm.exception.context["seed"], 2)

    def test_same_seed_same_triangle(self):
        first = simulate_triangle("Verrall", PARAMS["Verrall"], (5, 5), seed=9)
        second = simulate_triangle("verrall", PARAMS["Verrall"], (5, 5), seed=9)
        other = simulate_triangle("Verrall", PARAMS["Verrall"], (5, 5), seed=10)

        np.testing.assert_array_equal(first.values, second.values)
        self.assertFalse(np.array_equal(first.values, other.values))

    def test_noise_free_follows_example_state(self):
        params = {"sigma2": 0.0, "tau2_row": 0.0, "tau2_col": 0.0}
        triangle = simulate_triangle("Verrall", params, (4, 4), seed=1)
        state = get_recipe("Verrall").example_state((4, 4))

        # origin effects restart from a_0 = 0, so log x_ij = mu + b_j
        self.assertAlmostEqual(np.log(triangle.values[0, 0]), state[0])
        self.assertAlmostEqual(np.log(triangle.values[2, 3]), state[0] + state[3 + 3])
        self.assertAlmostEqual(np.log(triangle.values[3, 3]), np.log(triangle.values[0, 3]))

    def test_noise_free_development_ratios_grow(self):
        triangle = simulate_triangle("Hertig", {"sigma2": 0.0}, (6, 6), seed=1)
        self.assertTrue(np.all(triangle.values > 0))
        self.assertArrayClose(triangle.values[0], triangle.values[5], rtol=1e-10)


class TestToIncremental(TestCase):
    def test_kinds(self):
        grid = np.log([[100.0, 150.0, 175.0]])
        self.assertArrayClose(to_incremental(grid, ResponseKind.LOG_INCREMENTAL), [[100.0, 150.0, 175.0]])
        self.assertArrayClose(to_incremental(grid, ResponseKind.LOG_CUMULATIVE), [[100.0, 50.0, 25.0]])

        ratios = np.log([[100.0, 1.5, 175.0 / 150.0]])
        self.assertArrayClose(to_incremental(ratios, ResponseKind.LOG_DEV_RATIO), [[100.0, 50.0, 25.0]])


def fit_model(name: str, triangle, seed: int):
    recipe = get_recipe(name)
    series, param_map = recipe.build(triangle)
    return fit(param_map, series, n_starts=3, seed=seed, model=recipe.name, recipe_version=recipe.version)


@unittest.skipUnless(os.environ.get(SLOW_TESTS_ENV), f"set {SLOW_TESTS_ENV}=1 to run the recovery suite")
class TestRecovery(TestCase):
    """Fit the models to 10x10 triangles simulated from each of them."""

    n_seeds = 10

    def test_generating_model_wins_and_third_quartile_covers(self):
        for kind, group in RESPONSE_GROUPS.items():
            for name in group:
                wins = covered = 0
                for seed in range(self.n_seeds):
                    triangle = simulate_triangle(name, PARAMS[name], (10, 10), seed=seed)
                    fits = {model: fit_model(model, triangle, seed) for model in group}

                    ranking = compare(list(fits.values()))
                    wins += int(ranking.best(kind.value).model == name)

                    distribution = reserve_distribution(fits[name], triangle, n_draws=1000, seed=seed)
                    covered += int(reserve_sum(triangle) <= distribution.summary.q3)

                self.assertGreaterEqual(wins, 7, f"{name} won {wins} of {self.n_seeds}")
                self.assertGreaterEqual(covered, 8, f"{name} Q3 covered {covered} of {self.n_seeds}")

    def test_observation_variance_recovered(self):
        for name, params in PARAMS.items():
            estimates = []
            for seed in range(5):
                triangle = simulate_triangle(name, params, (10, 10), seed=seed)
                estimates.append(fit_model(name, triangle, seed).params["sigma2"])
            ratio = np.median(estimates) / params["sigma2"]
            self.assertGreater(ratio, 0.5, name)
            self.assertLess(ratio, 2.0, name)

    def test_plug_in_reserve_positive(self):
        for name, params in PARAMS.items():
            triangle = simulate_triangle(name, params, (10, 10), seed=0)
            estimate, full = plug_in_reserve(fit_model(name, triangle, 0), triangle)
            self.assertGreater(estimate, 0, name)
            self.assertTrue(np.all(np.isfinite(full.values)), name)
