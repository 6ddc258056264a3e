"""Exception hierarchy shared by every relaysim module."""


class RelaySimError(Exception):
    """Base class for all errors raised by relaysim."""


class DimensionMismatch(RelaySimError, ValueError):
    pass


class NotHermitian(RelaySimError, ValueError):
    pass


class NotPositiveDefinite(RelaySimError, ArithmeticError):
    """A non-positive pivot was met while factorizing a Hermitian matrix.

    Usually means the network is degenerate, e.g. zero local noise at a
    relay together with zero signal power.
    """


class SingularK(NotPositiveDefinite):
    """The relay noise covariance is singular (infinite-capacity regime)."""


class NoConvergence(RelaySimError, ArithmeticError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ZeroGain(RelaySimError, ValueError):
    pass


class ZeroChannel(RelaySimError, ValueError):
    pass


class InfeasibleGain(RelaySimError, ValueError):
    pass


class ConfigError(RelaySimError, ValueError):
    pass


class SweepPointFailed(RelaySimError, ArithmeticError):
    """Too many Monte Carlo trials at one sweep point had to be redrawn."""
