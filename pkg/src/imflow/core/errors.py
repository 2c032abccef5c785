class ImflowError(Exception):
    """
    Base class for every error raised by imflow.
    Each subclass carries the process exit code the command line maps it to.
    """
    exit_code = 4


class InputError(ImflowError):
    """Malformed or invalid input supplied by the caller."""
    exit_code = 2


class DiscretizationError(InputError):
    pass


class LengthMismatchError(InputError):
    pass


class EmptyTableError(InputError):
    pass


class AxisError(InputError):
    """Missing, duplicated or overlapping axes in a joint table request."""
    pass


class InvalidParameterError(InputError):
    pass


class StochasticCandidateError(InputError):
    pass


class InconsistentInputsError(InputError):
    pass


class DatasetError(InputError):
    pass


class UnachievableRequestError(ImflowError):
    """The request is well formed but cannot be realised for the given data."""
    exit_code = 3


class UnachievablePatternError(UnachievableRequestError):
    pass


class InvariantBreachError(ImflowError):
    """An identity that must hold by construction did not."""
    exit_code = 4


class NegativeInformationError(InvariantBreachError):
    pass
