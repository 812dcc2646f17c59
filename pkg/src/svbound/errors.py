"""Exception types shared across the library."""


class SvboundError(Exception):
    """Base class for all library-specific failures."""


class NotProvablyPositiveDefinite(SvboundError):
    """A rigorous factorization/test could not certify positive definiteness.

    Raised by the interval Cholesky factorization when a diagonal pivot
    interval contains a non-positive number.  This is a statement about the
    verification attempt, not about the matrix: the matrix may well be
    positive definite.
    """


class NotVerifiablyNonsingular(SvboundError):
    """The residual contraction bound ||I - X A|| < 1 could not be certified."""


class OrthogonalityDefectTooLarge(SvboundError):
    """alpha >= 1 or beta >= 1: the approximate factors are too far from
    B-orthonormal for the enclosure formulas to apply."""


class NonpositiveLowerBound(SvboundError):
    """An enclosure reaches into (-inf, 0]; reciprocal bounds are undefined.

    Reported as "inf" in table output.
    """


class PivotFailure(SvboundError):
    """Floating-point Cholesky hit a non-positive pivot."""


class VerificationInconclusive(SvboundError):
    """A required sub-certificate could not be established."""


class MatrixMarketError(SvboundError):
    """Malformed Matrix Market input; message carries the line number."""
