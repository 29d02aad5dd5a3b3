from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from claims_reserving.exceptions import DimensionError
from claims_reserving.ssm.constants import ParameterScale
from claims_reserving.ssm.spec import SsmSpec


@dataclass(frozen=True)
class ParamDescriptor:
    """One free parameter. `initial` is on the natural scale (a variance for LogVariance)."""

    name: str
    scale: ParameterScale = ParameterScale.LOG_VARIANCE
    initial: float = 1.0

    @property
    def initial_theta(self) -> float:
        if self.scale == ParameterScale.LOG_VARIANCE:
            return float(np.log(self.initial))
        return float(self.initial)

    def to_natural(self, theta: float) -> float:
        if self.scale == ParameterScale.LOG_VARIANCE:
            return float(np.exp(theta))
        return float(theta)


@dataclass(frozen=True, eq=False)
class ParamMap:
    """Free parameters and the rule that turns their natural values into an SsmSpec.

    `rule` receives a dict of natural-scale values keyed by parameter name and
    must not keep or mutate state between calls.
    """

    descriptors: tuple[ParamDescriptor, ...]
    rule: Callable[[dict[str, float]], SsmSpec]

    def __post_init__(self):
        object.__setattr__(self, "descriptors", tuple(self.descriptors))
        names = [d.name for d in self.descriptors]
        if len(set(names)) != len(names):
            raise DimensionError(f"Duplicate parameter names in {names}")

    @property
    def q(self) -> int:
        return len(self.descriptors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.descriptors)

    def initial_theta(self) -> np.ndarray:
        return np.array([d.initial_theta for d in self.descriptors], dtype=float)

    def natural(self, theta: Sequence[float]) -> dict[str, float]:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if len(theta) != self.q:
            raise DimensionError(f"Expected {self.q} parameters, got {len(theta)}")
        return {d.name: d.to_natural(value) for d, value in zip(self.descriptors, theta, strict=True)}

    def evaluate(self, values: dict[str, float]) -> SsmSpec:
        """Build the model straight from natural-scale values."""
        missing = set(self.names) - set(values)
        if missing:
            raise DimensionError(f"Missing values for parameters {sorted(missing)}")
        return self.rule(dict(values))

    def log_variance_mask(self) -> np.ndarray:
        return np.array([d.scale == ParameterScale.LOG_VARIANCE for d in self.descriptors], dtype=bool)


def materialize(param_map: ParamMap, theta: Sequence[float]) -> SsmSpec:
    """Spec at parameter vector `theta`; log-variance entries are exponentiated."""
    return param_map.evaluate(param_map.natural(theta))
