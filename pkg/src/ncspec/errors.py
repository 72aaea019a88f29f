"""Exception types raised throughout :mod:`ncspec`."""


class SpectralError(ValueError):
    """Base class for all input and data errors.

    ``guard`` names the numerical guard that rejected the input, if any.
    """

    def __init__(self, message="", guard=None):
        super().__init__(message)
        self.guard = guard


class InvalidInputError(SpectralError):
    """An argument violates a documented precondition."""


class InsufficientDataError(SpectralError):
    """A sequence is too short for the requested diagnostic."""

    def __init__(self, message="", guard="min-length"):
        super().__init__(message, guard)


class UnsupportedOrderError(SpectralError):
    """The operator order is not handled by the requested routine."""


class GuardViolation(RuntimeError):
    """A numerical guard failed. ``guard`` names the guard."""

    def __init__(self, guard, message):
        super().__init__(f"{guard}: {message}")
        self.guard = guard
