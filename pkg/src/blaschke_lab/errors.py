"""Exception hierarchy shared by all modules."""


class LabError(Exception):
    """Base class for every error raised by :mod:`blaschke_lab`."""


class DegenerateLambda(LabError, ValueError):
    """Phase geometry requested for ``lambda == 0``."""


class NonpositiveT(LabError, ValueError):
    pass


class OutOfRangeT(LabError, ValueError):
    """Scaled frequency outside the open interval ``(alpha, 1/alpha)``."""


class InvalidLambda(LabError, ValueError):
    pass


class CapacityExceeded(LabError):
    pass


class PrecisionExhausted(LabError, ArithmeticError):
    pass


class OracleCapExceeded(LabError):
    pass


class AliasingUncertified(LabError):
    pass


class InvalidRadius(LabError, ValueError):
    pass


class UncertifiedTail(LabError):
    pass


class OutOfWindow(LabError, ValueError):
    pass


class ResolutionInsufficient(LabError):
    pass


class CutoffInvalid(LabError, ValueError):
    pass


class NoRoot(LabError):
    pass


class EmptyWindow(LabError, ValueError):
    pass


class ZeroFrequency(LabError, ValueError):
    pass


class ConfigError(LabError, ValueError):
    pass


class CertificationFailure(LabError):
    """An invariant or cross-check failed."""
