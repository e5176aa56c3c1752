"""Exception types shared across the package."""


class ClearboundError(Exception):
    """Base class for all package errors."""


class InputError(ClearboundError, ValueError):
    """Raised when an argument violates a documented precondition."""


class ConvergenceError(ClearboundError, ArithmeticError):
    """Adaptive quadrature hit its depth limit before meeting tolerance.

    Attributes:
        estimate: best available value of the integral.
        error_bound: estimated absolute error of ``estimate``.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class UnsupportedRenderError(ClearboundError):
    """Raised when a scene cannot be rendered (only 2D is supported)."""
