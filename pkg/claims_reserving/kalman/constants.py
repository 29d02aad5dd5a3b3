from enum import Enum

import numpy as np

MODULE_NAME = "kalman"

LOG_2PI = float(np.log(2 * np.pi))

# both relative to the largest diffuse covariance entry seen so far (at least 1)
# F_inf above this, also scaled by |z|^2, marks a diffuse update
DIFFUSE_TOLERANCE = 1e-8
# the diffuse covariance is dropped once all its entries fall below this
COLLAPSE_TOLERANCE = 1e-8
DEGENERATE_VARIANCE = 1e-14

MIN_RESIDUALS = 8


class StepKind(str, Enum):
    DIFFUSE = "diffuse"
    REGULAR = "regular"
    DEGENERATE = "degenerate"
