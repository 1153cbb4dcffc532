"""Exception types shared across the package.

Each carries a stable ``exit_code`` so the command line can map failures
to distinct process statuses.
"""


class CMMahlerError(Exception):
    exit_code = 1


class DomainError(CMMahlerError, ValueError):
    """Input outside the region where an operation is defined."""

    exit_code = 2


class UsageError(CMMahlerError):
    exit_code = 2


class DataError(CMMahlerError):
    """Missing or inconsistent bundled/ingested data."""

    exit_code = 3


class AccuracyError(CMMahlerError):
    """A numerical method failed to reach the requested precision.

    ``estimate`` and ``error`` hold the best value found and its error bound.
    """

    exit_code = 4

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class PrecisionExhausted(AccuracyError):
    """PSLQ ran out of working precision before deciding."""


class TruncationError(AccuracyError):
    """Not enough q-expansion coefficients for the requested evaluation."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class RankError(CMMahlerError):
    """A linear system over q-expansions is underdetermined."""

    exit_code = 3


class NotFrickeCompatible(AccuracyError):
    """Two-point Fricke probe disagreed."""


class VerificationFailure(CMMahlerError):
    exit_code = 5


class SpanUnstable(VerificationFailure):
    """A Hecke operator maps the span outside itself."""

    def __init__(self, message, prime=None):
        super().__init__(message)
        self.prime = prime
