"""Exception hierarchy.

Two families matter to callers: ``RegimeError`` for parameters or inputs that
fall outside the setting a routine is defined for, and ``NumericalError`` for
failures of an otherwise well-posed computation. The CLI maps them to exit
codes 2 and 3.
"""


class MetapopError(Exception):
    """Base class for all package errors."""


class RegimeError(MetapopError):
    """Parameters violate a precondition of the requested computation."""


class NumericalError(MetapopError):
    """A numerical procedure failed on admissible input."""


class NotDimorphicRegime(RegimeError):
    pass


class DimorphicRegime(RegimeError):
    pass


class DomainError(RegimeError):
    pass


class DegenerateBoundary(RegimeError):
    pass


class NoRoot(NumericalError):
    pass


class NoEquilibrium(NumericalError):
    pass


class FitnessPositive(NumericalError):
    pass


class DegenerateQuadratic(NumericalError):
    pass


class SingularChain(NumericalError):
    pass


class LogDomain(NumericalError):
    pass


class NonConvergence(NumericalError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class Extinction(NumericalError):
    pass
