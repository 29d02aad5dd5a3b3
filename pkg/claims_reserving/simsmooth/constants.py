MODULE_NAME = "simsmooth"

QUANTILE_METHOD = "linear"
