APP_NAME = "claims_reserving"

DEFAULT_N_DRAWS = 10000
MIN_SIMULATION_DRAWS = 100
DEFAULT_SEED = 20240101
DEFAULT_QUANTILES = (0.5, 0.75, 0.9, 0.95, 0.99)
DEFAULT_HISTOGRAM_BINS = 40
DEFAULT_N_STARTS = 5
DRAW_CHUNK_SIZE = 1000
MAX_REJECTION_RATE = 0.01

THREADS_ENV = "CLAIMS_RESERVING_THREADS"
LOG_DIR_ENV = "CLAIMS_RESERVING_LOG_DIR"
SLOW_TESTS_ENV = "CLAIMS_RESERVING_SLOW_TESTS"

LOG_FILE_NAME = "reserving_log.jsonl"
