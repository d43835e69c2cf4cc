"""Exception hierarchy shared by every module of the package."""


class IBPDCAError(Exception):
    """Base class for all package errors."""


class ShapeMismatchError(IBPDCAError, ValueError):
    pass


class NonFiniteError(IBPDCAError, ValueError):
    pass


class NumericalFailureError(IBPDCAError, ArithmeticError):
    """Raised when an iterative dense kernel (e.g. the SVD) fails to converge."""


class SymmetryViolationError(IBPDCAError, ValueError):
    """Raised when an inverse tube DFT would leave a non-negligible imaginary part."""


class ParameterError(IBPDCAError, ValueError):
    pass


class DivergenceError(IBPDCAError, ArithmeticError):
    """A solver produced a non-finite iterate.

    The partial trace recorded before the failure is kept on ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class FormatError(IBPDCAError, ValueError):
    """Malformed or inconsistent file contents."""
