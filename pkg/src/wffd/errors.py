"""Exception types raised by the library."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class UnsupportedModelError(InvalidInputError):
    """Raised when a model variant has no implementation for the requested operation."""


class ConvergenceError(RuntimeError):
    """Raised when a numerical routine fails to reach its tolerance.

    The best available estimate is kept on ``best_estimate`` so callers can
    still report it.
    """

    def __init__(self, message, best_estimate=float("nan"), error_estimate=float("inf")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
