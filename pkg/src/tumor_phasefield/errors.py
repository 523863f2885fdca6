"""Exception types raised by the solver."""


class PhaseFieldError(Exception):
    """Base class for all package errors."""


class ResolventDivergence(PhaseFieldError):
    """The scalar resolvent iteration did not converge."""


class UnsupportedPotential(PhaseFieldError):
    """The requested operation is not defined for this potential."""


class IncompatiblePotential(PhaseFieldError):
    """Proliferation function and potential cannot be combined."""


class SingularSystem(PhaseFieldError):
    """A linear system has no solution (e.g. pure Neumann with nonzero mean)."""


class NewtonDivergence(PhaseFieldError):
    """Newton's method failed to reach the requested tolerance."""


class InsufficientHistory(PhaseFieldError):
    """Fewer snapshots than an operation needs."""


class InvalidInitialData(PhaseFieldError):
    """Initial data outside the effective domain of the potential."""


class ParseError(PhaseFieldError):
    """Malformed configuration text."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(PhaseFieldError, ValueError):
    """A configuration value violates a model or discretization invariant."""


class FormatError(PhaseFieldError):
    """Snapshot file is truncated or has the wrong magic."""


class GridMismatch(PhaseFieldError):
    """Snapshot grid does not match the expected grid."""
