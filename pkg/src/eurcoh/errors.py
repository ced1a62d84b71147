"""Exception types raised across the package."""


class EurcohError(Exception):
    pass


class NotHermitian(EurcohError, ValueError):
    pass


class NotPSD(EurcohError, ValueError):
    pass


class TraceMismatch(EurcohError, ValueError):
    pass


class InvalidSubsystem(EurcohError, ValueError):
    pass


class DimensionMismatch(EurcohError, ValueError):
    pass


class NoConvergence(EurcohError, RuntimeError):
    pass


class AngleOutOfRange(EurcohError, ValueError):
    pass


class NotAProbabilityVector(EurcohError, ValueError):
    pass


class UnderdeterminedSettings(EurcohError, ValueError):
    pass


class InvalidConfig(EurcohError, ValueError):
    pass


class MalformedCsv(EurcohError, ValueError):
    pass
