"""Exception hierarchy shared by every module."""


class JensenLabError(Exception):
    """Base class for all package errors."""


class InputError(JensenLabError, ValueError):
    """Rejected input: non-finite entries, wrong shapes, bad parameters."""


class DomainError(InputError):
    """A parameter lies outside the domain where the quantity is defined."""


class ShapeError(InputError):
    pass


class StructureError(InputError):
    """Operator lacks the structure an operation needs (e.g. periodicity)."""


class SizeError(InputError):
    pass


class SamplingError(InputError):
    pass


class ConfigError(InputError):
    pass


class SingularMatrixError(JensenLabError, ArithmeticError):
    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class NumericalError(JensenLabError, ArithmeticError):
    """Quadrature or limit process failed to converge."""


class QuadratureError(NumericalError):
    pass


class NonConvergenceError(NumericalError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ResolutionError(NumericalError):
    """Discretization cannot resolve enough bound states; carries a suggestion."""

    def __init__(self, message, suggested_L=None, suggested_n=None):
        super().__init__(message)
        self.suggested_L = suggested_L
        self.suggested_n = suggested_n


class CheckFailed(JensenLabError, AssertionError):
    """An inequality or invariant that must hold was violated."""
