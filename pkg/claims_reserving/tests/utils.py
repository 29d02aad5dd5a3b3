import json
import os
import shutil
import tempfile
import unittest

import numpy as np

from claims_reserving.triangle import Triangle, triangle_from_json

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, f"{name}.json")


class TestCase(unittest.TestCase):
    def load_fixture(self, name):
        with open(fixture_path(name), "rb") as f:
            data = f.read()
        return json.loads(data)

    def load_triangle(self, name) -> Triangle:
        return triangle_from_json(self.load_fixture(name))

    def make_tempdir(self) -> str:
        path = tempfile.mkdtemp(prefix="claims_reserving_")
        self.addCleanup(shutil.rmtree, path, ignore_errors=True)
        return path

    def assertArrayClose(self, actual, expected, rtol=1e-10, atol=0.0):
        np.testing.assert_allclose(np.asarray(actual, dtype=float), np.asarray(expected, dtype=float), rtol=rtol, atol=atol)


def runoff_triangle(values) -> Triangle:
    """Incremental triangle observed on the regular upper-left runoff shape."""
    values = np.asarray(values, dtype=float)
    n_origin, n_dev = values.shape
    observed = np.add.outer(np.arange(n_origin), np.arange(n_dev)) <= n_origin - 1
    return Triangle(values=np.where(observed, values, np.nan), observed=observed)


def random_runoff(rng: np.random.Generator, n_origin: int, n_dev: int | None = None) -> Triangle:
    """Positive incremental runoff triangle with a decaying development pattern."""
    n_dev = n_dev or n_origin
    level = rng.uniform(500, 2000, size=(n_origin, 1))
    pattern = np.exp(-0.4 * np.arange(n_dev))
    values = level * pattern * rng.lognormal(0.0, 0.15, size=(n_origin, n_dev))
    return runoff_triangle(values)
