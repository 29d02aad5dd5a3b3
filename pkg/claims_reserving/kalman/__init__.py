from claims_reserving.kalman.constants import StepKind
from claims_reserving.kalman.diagnostics import ResidualReport, dump_moments, residual_diagnostics
from claims_reserving.kalman.filter import FilterOutput, FilterStep, kalman_filter, replay_filter
from claims_reserving.kalman.smoother import (
    ComponentPath,
    MissingPrediction,
    SmootherOutput,
    kalman_smoother,
    smooth_batch,
)
