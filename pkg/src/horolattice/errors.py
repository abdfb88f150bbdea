"""Exception types shared across the package."""


class HorolatticeError(Exception):
    """Base class for all library-specific errors."""


class OutOfRangeError(HorolatticeError, ValueError):
    """An integer argument lies outside its documented range."""


class OverflowLimitError(HorolatticeError, OverflowError):
    """An exact integer result would exceed the documented 2**127 cap."""


class TooLargeError(HorolatticeError):
    """An enumeration or memory cap would be exceeded (CLI exit code 3)."""


class NotPrimitiveError(HorolatticeError, ValueError):
    """A vector that must be primitive (gcd 1, possibly jointly with q) is not."""


class NotAUnitError(HorolatticeError, ValueError):
    """A residue that must be invertible mod q is not."""


class NotUnimodularError(HorolatticeError, ValueError):
    """A matrix that must have determinant +1 does not."""


class SingularBasisError(HorolatticeError, ValueError):
    """A lattice basis with nonzero determinant is required."""


class DeterminantMismatchError(HorolatticeError, ValueError):
    """A basis determinant does not match the expected index."""


class DimensionTooSmallError(HorolatticeError, ValueError):
    """The operation is undefined below a minimum dimension."""


class DimensionTooLargeError(HorolatticeError, ValueError):
    """The operation is capped at a maximum dimension."""


class InvalidToleranceError(HorolatticeError, ValueError):
    """A certification tolerance must be strictly positive."""
