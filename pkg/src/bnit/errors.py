"""Exception hierarchy shared by all bnit modules.

Every error that should surface to a CLI user maps to exit code 2 (usage /
regime errors); test verdicts use exit codes 0 (accept) and 1 (reject).
"""


class BnitError(Exception):
    """Base class for all bnit-specific errors."""

    exit_code = 2


class DimensionMismatch(BnitError):
    """Two objects that must share an ambient dimension n do not."""


class TooLargeForDense(BnitError):
    """Dense enumeration requested for an n beyond the supported cap."""


class InsufficientSamples(BnitError):
    """A tester was handed fewer samples than its precondition requires."""

    def __init__(self, message: str, required: int | None = None,
                 available: int | None = None):
        super().__init__(message)
        self.required = required
        self.available = available


class ReferenceNotPositive(BnitError):
    """Identity-test reference distribution has a zero-probability cell."""


class InvalidEpsilon(BnitError):
    """Distance parameter outside (0, 1]."""


class RegimeViolation(BnitError):
    """Parameters outside the declared validity regime of a construction."""


class OddChildCount(BnitError):
    """Strict-evenness mode refused an odd number of child coordinates."""


class PreconditionUniform(BnitError):
    """A marginal that must be uniform (within tolerance) is not."""
