import numpy as np

from claims_reserving.reserving_log import create_log
from claims_reserving.simsmooth.constants import MODULE_NAME


def create_simsmooth_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)


def draw_generator(seed: int | None, index: int) -> np.random.Generator:
    """Independent generator for draw `index`, the same whatever chunk or thread computes it."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def covariance_factor(cov: np.ndarray) -> np.ndarray:
    """F with F F' = cov for a symmetric PSD matrix; tiny negative eigenvalues are clipped."""
    cov = np.atleast_2d(cov)
    if not cov.size:
        return cov.copy()
    eigenvalues, eigenvectors = np.linalg.eigh((cov + cov.T) / 2)
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
