"""Mahler measures of two tempered families at CM parameters and their
L-value identities."""

from .errors import (AccuracyError, CMMahlerError, DataError, DomainError, NotFrickeCompatible,
                     PrecisionExhausted, RankError, SpanUnstable, TruncationError, UsageError,
                     VerificationFailure)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CMMahlerError", "DataError", "DomainError", "NotFrickeCompatible",
    "PrecisionExhausted", "RankError", "SpanUnstable", "TruncationError", "UsageError",
    "VerificationFailure", "__version__",
]
