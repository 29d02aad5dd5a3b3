from enum import Enum

MODULE_NAME = "ssm"

PSD_TOLERANCE = 1e-8


class ParameterScale(str, Enum):
    LOG_VARIANCE = "LogVariance"
    UNCONSTRAINED = "Unconstrained"
