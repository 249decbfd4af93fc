"""Exception hierarchy for solver failures.

Every solver-side failure derives from SolverError so the CLI can map it to a
single documented exit code (3).  Construction-time misuse (bad arguments,
unknown problem names) raises UsageError (exit 2).
"""


class SweepError(Exception):
    """Base class for all package errors."""


class UsageError(SweepError):
    """Invalid configuration or unknown problem name."""

    exit_code = 2


class SolverError(SweepError):
    """Base class for numerical failures during a solve."""

    exit_code = 3


class PhysicalityError(SolverError):
    """A state with non-positive density or pressure was produced."""


class InversionError(SolverError):
    """Newton iteration for the flux inverse failed to converge."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class NearSonicError(SolverError):
    """Flux Jacobian eigenvalue within tolerance of zero; inversion ill-posed.

    Callers must switch to the extrapolation path instead of stepping on.
    """

    def __init__(self, msg, index=None, eigenvalue=None):
        super().__init__(msg)
        self.index = index
        self.eigenvalue = eigenvalue


class NoJumpError(SolverError):
    """No entropy-admissible discontinuity exists for the given state."""


class StructureError(SolverError):
    """Assumed solution structure (branch/shock layout) does not hold."""


class NotBracketedError(SolverError):
    """Scalar root not bracketed on the supplied interval."""


class CflError(SolverError):
    """Marching step violates the stability ratio of the sweep scheme."""


class TrackingError(SolverError):
    """Shock-curve tracking failed to converge in a column."""

    def __init__(self, msg, column=None):
        super().__init__(msg)
        self.column = column


class StagnationError(SolverError):
    """Pseudo-time marching failed to reach steady state."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class ArityError(SolverError):
    """Operation received fewer data points than it requires."""
