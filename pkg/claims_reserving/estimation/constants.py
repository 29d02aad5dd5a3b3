from enum import Enum

MODULE_NAME = "estimation"

MAX_ITER_PER_PARAM = 200
RELATIVE_FATOL = 1e-8
XATOL = 1e-7
START_JITTER = 0.5
LOG_VARIANCE_BOUNDS = (-25.0, 25.0)
DEGENERATE_VARIANCE = 1e-10


class FitStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max-iter"
    DEGENERATE = "degenerate"
