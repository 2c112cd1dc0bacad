"""Exception hierarchy shared by all sbwave modules."""


class SbwaveError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SbwaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoSolutionError(DomainError):
    """The requested parameters admit no solution (e.g. period below its infimum)."""


class UsageError(SbwaveError, ValueError):
    """An operation was called with inconsistent inputs (API misuse)."""


class GridMismatchError(UsageError):
    """Two fields that must share a grid do not."""


class ResolutionError(SbwaveError):
    """A spectral field is under-resolved for the requested operation."""


class TruncationError(SbwaveError):
    """A lattice computation lost mass through its boundary."""


class NumericalError(SbwaveError):
    """Base class for runtime numerical failures (exit code 3 in the CLI)."""


class BlowUpError(NumericalError):
    """Time integration produced non-finite values.

    Attributes
    ----------
    last_state : the last finite state observed, or None.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NonConvergenceError(NumericalError):
    """An iterative solver failed to converge.

    Attributes
    ----------
    history : residual (or diagnostic) history of the failed iteration.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class DegenerateJacobianError(NumericalError):
    """A Newton Jacobian was numerically singular (possible bifurcation)."""


class ConservationError(NumericalError):
    """A monitored conserved quantity drifted beyond its tolerance."""
