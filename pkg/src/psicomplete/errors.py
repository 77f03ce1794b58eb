"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class PsicError(Exception):
    """Base class for all errors raised by psicomplete."""


class DimensionMismatch(PsicError, ValueError):
    pass


class NonHermitianInput(PsicError, ValueError):
    pass


class SingularOperator(PsicError, ValueError):
    """An operator that must be inverted has an eigenvalue at or below the floor."""


class SingularFrame(SingularOperator):
    """The element sum G is singular, so the element set cannot be informationally complete."""


class IndefiniteOperator(PsicError, ValueError):
    pass


class ZeroVector(PsicError, ValueError):
    pass


class NonUnitBloch(PsicError, ValueError):
    pass


class InvalidPovm(PsicError, ValueError):
    """Element set fails positivity or does not sum to the identity."""


class ThrowawayNotPositive(InvalidPovm):
    """The residual element T of the 2D construction has a negative eigenvalue."""


class IndexOutOfRange(PsicError, IndexError):
    pass


class IndicesEqual(PsicError, ValueError):
    pass


class InvalidParameter(PsicError, ValueError):
    pass


class NotFound(PsicError):
    """The ambiguity search exhausted its restarts without an acceptable witness."""
