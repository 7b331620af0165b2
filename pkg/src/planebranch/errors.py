"""Exception types shared across modules."""
from __future__ import annotations

from .scalars import FieldMismatch, NotRepresentable


class TruncationError(ArithmeticError):
    """The requested quantity is not determined at the current truncation."""


class CrossCheckError(RuntimeError):
    """Two independent computations of the same number disagree."""


class Unverifiable(ArithmeticError):
    """A hypothesis of a certificate cannot be checked with the data at hand."""


class NotNilpotent(ValueError):
    """A nilpotent vector field (or unipotent jet) was required."""


__all__ = [
    "CrossCheckError", "FieldMismatch", "NotNilpotent", "NotRepresentable",
    "TruncationError", "Unverifiable",
]
