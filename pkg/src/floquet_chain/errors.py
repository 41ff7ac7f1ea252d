"""Exception hierarchy. CLI maps ValidationError -> exit 2, ConvergenceError -> 3, I/O -> 4."""


class FloquetChainError(Exception):
    pass


class ValidationError(FloquetChainError, ValueError):
    """Invalid physical parameters or malformed configuration."""


class StepNotCommensurate(ValidationError):
    """Requested step size does not divide the drive switch times."""


class NonStepDrive(ValidationError):
    """Operation requires a piecewise-constant (step) drive."""


class MissingPhaseConvention(ValidationError):
    """Trajectory does not carry the frame tag needed to interpret phases."""


class NotBound(ValidationError):
    """Operation requires a mode classified as Bound."""


class PlanInvalid(ValidationError):
    """Sweep plan fails validation."""


class NoRootInInterval(FloquetChainError):
    """Root search found no |F0| zero in the requested interval."""


class ConvergenceError(FloquetChainError):
    pass


class TruncationNotConverged(ConvergenceError):
    """Sambe truncation ceiling reached before the spectrum stabilized."""

    def __init__(self, message, k_max=None, partial=None):
        super().__init__(message)
        self.k_max = k_max
        self.partial = partial


class QuadratureNotConverged(ConvergenceError):
    """Adaptive quadrature refinement exhausted without meeting tolerance."""


class GapUndefined(FloquetChainError):
    """The folded environment band covers the whole quasienergy zone (2pi/T <= 4J)."""


class HorizonBeyondRecurrence(UserWarning):
    """Simulation horizon exceeds the finite-size recurrence time of the chain."""
