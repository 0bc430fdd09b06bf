"""Exception types shared across the package."""

from __future__ import annotations


class MLOscError(Exception):
    """Base class for all errors raised by :mod:`mlosc`."""


class InvalidParameterError(MLOscError, ValueError):
    """A parameter lies outside the admissible range."""


class PoleError(MLOscError, ValueError):
    """Gamma evaluated at a non-positive integer."""


class NonConvergenceError(MLOscError, ArithmeticError):
    """A series or expansion failed to reach its tolerance within the term cap."""


class SectorViolationError(MLOscError, ValueError):
    """Argument lies outside the sector where the decay bound is claimed."""


class DimensionMismatchError(MLOscError, ValueError):
    pass


class DegenerateError(MLOscError, ValueError):
    """All coefficients vanish (to within 1e-300)."""


class DivergentIntegralError(MLOscError, ArithmeticError):
    """A root of multiplicity ``m`` meets an exponent ``e`` with ``m * e >= 1``."""


class BudgetExceededError(MLOscError, RuntimeError):
    """The evaluation budget ran out; ``result`` carries the best estimate."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class PreconditionError(MLOscError, ValueError):
    """A verification precondition does not hold (e.g. derivative lower bound)."""


class DerivativeConditionError(PreconditionError):
    """``|D^kappa P| >= 1`` fails somewhere on the cube."""


class ZeroDiscriminantError(PreconditionError):
    pass


class CaseRoutingError(InvalidParameterError):
    """delta falls outside the range covered by the two estimate cases."""


class ParseError(MLOscError, ValueError):
    """Malformed polynomial text or configuration."""


class InsufficientPointsError(InvalidParameterError):
    """A fit needs at least three points."""


class NonPositiveValueError(InvalidParameterError):
    """Log-log fits need strictly positive data."""
