"""Exception types shared across the package."""


class PolarPunctError(Exception):
    """Base class for all polarpunct runtime failures."""


class SingularMatrixError(PolarPunctError):
    """A GF(2) matrix that must be invertible is rank-deficient."""


class InfeasibleRateError(PolarPunctError):
    """A requested rate ladder cannot be realized for the given code."""


class ConstructionViolationError(PolarPunctError):
    """A constructed pattern family failed its post-construction verification."""


class EnumerationCapError(PolarPunctError):
    """An exhaustive enumeration would exceed its configured size cap."""


class ZeroInInfoSetError(PolarPunctError):
    """Channel 0 cannot be an information channel for the seed-sequence construction."""


class NonReciprocalDcmError(PolarPunctError):
    """Shortened (DCM) decoding is only defined for reciprocal patterns."""
