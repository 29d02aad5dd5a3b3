class ReservingError(Exception):
    """Base error for the reserving pipeline.

    `exit_code` is what the command line returns when the error reaches it.
    """

    exit_code = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context


class ValidationError(ReservingError):
    exit_code = 2


class TriangleFormatError(ValidationError):
    pass


class PositivityViolation(ValidationError):
    def __init__(self, cell: tuple[int, int], value: float, message: str | None = None):
        row, col = cell
        message = message or (
            f"Cell (row {row + 1}, column {col + 1}) holds {value!r}; a strictly positive value is "
            "required before taking logs (see --allow-epsilon-shift)"
        )
        super().__init__(message, cell=cell, value=value)
        self.cell = cell
        self.value = value


class NonRunoffMaskError(ValidationError):
    pass


class WrongKindError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class UnknownModelError(ValidationError):
    pass


class NumericalError(ReservingError):
    exit_code = 3


class UnderIdentifiedError(NumericalError):
    pass


class FilterError(NumericalError):
    pass


class ReconstructionError(NumericalError):
    pass


class EstimationError(NumericalError):
    pass


class SimulationError(NumericalError):
    pass
