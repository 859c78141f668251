class DemixingError(Exception):
    """Base class of every error raised by the coded demixing library."""


class FieldError(DemixingError):
    pass


class GraphConstructionError(DemixingError):
    pass


class LengthMismatchError(DemixingError):
    pass


class DimensionMismatchError(DemixingError):
    pass


class DegenerateMessageError(DemixingError):
    """A variable-to-check product vanished everywhere (inconsistent hard beliefs)."""


class PreconditionError(DemixingError):
    pass


class OperatorError(DemixingError):
    pass


class OccupancyMethodError(DemixingError):
    pass


class ReceiverModeError(DemixingError):
    pass
