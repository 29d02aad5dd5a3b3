MODULE_NAME = "models"

DEFAULT_INITIAL_VARIANCE = 0.1
MIN_INITIAL_VARIANCE = 1e-4
# starting walk variances as a share of the starting observation variance
WALK_VARIANCE_SHARE = 0.1

# level of the first cell used by the example states
EXAMPLE_LOG_LEVEL = 7.0
# smallest growth of the example development ratios past the first lags
EXAMPLE_TAIL_GROWTH = 0.25

MAX_SIMULATION_ATTEMPTS = 100
