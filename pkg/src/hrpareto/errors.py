"""Semantic exception hierarchy.

Two branches matter for callers: ``InputError`` (the input violates a
documented contract and the caller can fix it) and ``NumericalError`` (the
computation itself broke down: singular solve, stalled iteration). The CLI
maps them to exit codes 1 and 2 respectively.
"""


class HrParetoError(Exception):
    """Base class for every error raised by this package."""


class InputError(HrParetoError, ValueError):
    """Input violates a documented precondition or invariant."""


class NonSymmetricError(InputError):
    """Matrix is not symmetric within the accepted round-off budget."""


class NotS1Error(InputError):
    """Matrix does not have (numerically) zero row and column sums."""


class NotS1PlusError(InputError):
    """Matrix is not positive semi-definite of rank d-1 with constant kernel."""


class NotStrictlyCNDError(InputError):
    """Matrix is not strictly conditionally negative definite."""


class OutsideSupportError(InputError):
    """Evaluation point lies outside the exceedance region."""


class DomainError(InputError):
    """Argument outside the mathematical domain of the operation."""


class NotIntegrableError(InputError):
    """The requested mass is infinite for these parameters.

    ``reasons`` lists which precondition failed: ``"spectral"`` (the
    precision matrix is not PSD of rank d-1) and/or ``"linear"`` (the
    coefficients of mu sum to at most d).
    """

    def __init__(self, message: str, reasons: tuple = ()):
        super().__init__(message)
        self.reasons = tuple(reasons)


class DegenerateProposalError(InputError):
    """Importance-sampling proposal covariance is not positive definite."""


class DimensionTooLargeError(InputError):
    """Operation with exponential cost refused beyond its dimension cap."""


class NumericalError(HrParetoError):
    """Numerical failure: singular system, non-convergent iteration."""


class SingularVariogramError(NumericalError):
    """Variogram linear system is numerically singular."""


class ConvergenceError(NumericalError):
    """Iterative routine failed to converge within its sweep budget."""
