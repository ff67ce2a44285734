"""Exception types shared across the package."""


class MimomeError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(MimomeError):
    """Matrix expected to be Hermitian is not (beyond tolerance)."""


class NotPositiveDefinite(MimomeError):
    """Cholesky factorization failed; matrix is not positive definite."""


class RankDeficient(MimomeError):
    """Operation requires full column rank and the input lacks it."""


class SingularNoise(MimomeError):
    """Noise cross-covariance is at (or numerically at) the unit spectral
    boundary; log-dets would diverge.  Use the singular-noise reduction."""


class PreconditionViolated(MimomeError):
    """Input violates an operation's stated dimension/rank restrictions."""


class DomainError(MimomeError):
    """Scalar argument outside the formula's domain of validity."""


class ParseError(MimomeError):
    """Matrix file could not be parsed."""


class DimensionMismatch(MimomeError):
    """Channel matrices have incompatible shapes."""


class SolverNotConverged(MimomeError):
    """Saddle solver hit its iteration cap before meeting tolerance."""
