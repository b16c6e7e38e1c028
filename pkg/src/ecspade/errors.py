"""Exception types shared across the package."""


class ECSpadeError(ValueError):
    pass


class DimMismatch(ECSpadeError):
    pass


class NotSPD(ECSpadeError):
    """Covariance is not symmetric positive definite."""


class BadNu(ECSpadeError):
    """Tail parameter outside the supported range (nu must exceed 2)."""


class ZeroTarget(ECSpadeError):
    pass


class IdentityMismatch(ECSpadeError):
    """The two constructions of the target-rejecting matrix disagree."""


class BadBeta(ECSpadeError):
    pass


class DegenerateQuadratic(ECSpadeError):
    """Pixel lies on the target line, so the beta quadratic has a zero root."""


class OutOfRange(ECSpadeError):
    pass


class EmptyInput(ECSpadeError):
    pass


class ConfigError(ECSpadeError):
    pass


class NumericalError(ECSpadeError, ArithmeticError):
    pass
