from typing import NewType

import numpy as np

from claims_reserving.ssm import ParamMap
from claims_reserving.triangle import ResponseKind, Sequencing, TransformedSeries, Triangle

ModelName = NewType("ModelName", str)


class RecipeController:
    """A reserving model: which response it uses, how it is sequenced and how
    a triangle becomes a parameterized state space model."""

    name: ModelName
    version: str = "1"
    response_kind: ResponseKind
    sequencing: Sequencing
    declared_q: int

    def build(self, triangle: Triangle) -> tuple[TransformedSeries, ParamMap]:
        raise NotImplementedError()

    def build_for_shape(self, shape: tuple[int, int]) -> ParamMap:
        """Parameter map for a grid of this shape, independent of any data."""
        raise NotImplementedError()

    def example_state(self, shape: tuple[int, int]) -> np.ndarray:
        """A plausible pre-sample state for simulating triangles from the model."""
        raise NotImplementedError()
