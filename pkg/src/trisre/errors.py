"""Exception types raised across the package."""


class TrisreError(Exception):
    """Base class for all package-specific errors."""


class MomentDiverges(TrisreError):
    """Requested absolute/signed moment is infinite for this law."""


class LogMomentUndefined(TrisreError):
    """E log|X| does not exist (law has an atom at zero)."""


class TiltUnsupported(TrisreError):
    """The family is not closed under the |x|^alpha exponential tilt."""


class NotContractive(TrisreError):
    """No moment exponent makes the multiplicative part contractive."""


class NoRoot(TrisreError):
    """beta -> E|A|^beta never reaches 1; no Kesten-Goldie index exists."""


class WeightDegenerate(TrisreError):
    """Importance weights collapsed (effective sample size too small)."""


class RequiresEqualDiagonal(TrisreError):
    """Operation defined only for models with almost-surely equal diagonals."""


class RequiresMuZero(TrisreError):
    """Operation defined only when the tilted off-diagonal drift vanishes."""


class RegimeMismatch(TrisreError):
    """Model is not in the regime this estimator is valid for."""


class RequiresExactTilt(TrisreError):
    """Sampling under the tilted law needs an exactly tiltable diagonal."""


class NonPositiveOrderStat(TrisreError):
    """Hill estimator needs the top order statistics strictly positive."""


class DegenerateTail(TrisreError):
    """All top order statistics coincide; tail index is undefined."""


class InsufficientSupport(TrisreError):
    """Too few usable grid points inside the empirical support."""


class ArgumentOutOfRange(TrisreError):
    """Closed-form constant requested outside its validity range."""


class UnsupportedRegime(TrisreError):
    """No implemented theorem case covers this model."""
