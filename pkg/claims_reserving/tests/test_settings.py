from claims_reserving.exceptions import UnknownModelError, ValidationError
from claims_reserving.settings import RunConfig
from claims_reserving.tests.utils import TestCase


class TestRunConfig(TestCase):
    def test_resolves_model_names(self):
        config = RunConfig(models=("verrall", "BSM")).validate()
        self.assertEqual(config.models, ("Verrall", "BSM"))

    def test_invalid_options(self):
        invalid = [
            {"models": ("Hertig", "hertig")},
            {"n_draws": 0},
            {"quantiles": (0.5, 1.0)},
            {"epsilon_shift": -1.0},
            {"output_format": "xml"},
            {"n_starts": 0},
            {"histogram_bins": 0},
            {"threads": 0},
        ]
        for options in invalid:
            with self.assertRaises(ValidationError, msg=options):
                RunConfig(**options).validate()

    def test_unknown_model(self):
        with self.assertRaises(UnknownModelError):
            RunConfig(models=("Mack",)).validate()

    def test_simulation_draws(self):
        RunConfig(n_draws=50).validate()
        with self.assertRaises(ValidationError):
            RunConfig(n_draws=50).validate(for_simulation=True)

    def test_as_dict(self):
        data = RunConfig(models=("CC",), out_dir="/tmp/out", threads=2).as_dict()
        self.assertEqual(data["models"], ["CC"])
        self.assertNotIn("out_dir", data)
        self.assertNotIn("threads", data)
        self.assertEqual(data["quantiles"], [0.5, 0.75, 0.9, 0.95, 0.99])
