"""Exception hierarchy shared by every module."""


class GinibreError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(GinibreError, ValueError):
    """An argument violates a documented precondition."""


class NumericalFailure(GinibreError, ArithmeticError):
    """An iterative numerical method did not converge."""


class DegenerateInputError(GinibreError, ArithmeticError):
    """The input sits on a probability-zero degenerate set (e.g. a singular matrix)."""


class ToleranceFailure(NumericalFailure):
    """Adaptive quadrature stopped before reaching the requested tolerance.

    The best available estimate and its error bound are attached so that
    callers can decide whether to use them anyway.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def require(condition, message):
    if not condition:
        raise InvalidArgumentError(message)
