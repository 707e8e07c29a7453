"""Exception hierarchy shared by every module."""


class WqedError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(WqedError, ValueError):
    pass


class NonPositiveGroupVelocity(ParameterError):
    pass


class NegativeCoupling(ParameterError):
    pass


class NegativeDecay(ParameterError):
    pass


class NonPositiveEnergy(ParameterError):
    """Photon energy outside the linear-dispersion regime (E <= 0)."""


class DegeneracyRequired(ParameterError):
    """Closed form needs omega_a == omega_e and gamma_a == gamma_e."""


class RequiresColocated(ParameterError):
    pass


class BothCouplingsZero(ParameterError):
    pass


class SingularSystem(WqedError, ArithmeticError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConfigViolation(ParameterError):
    pass


class NonConvergent(WqedError, ArithmeticError):
    pass


class PacketNotCleared(WqedError, RuntimeError):
    pass


class BandViolation(ParameterError):
    pass


class EngineMismatch(ParameterError):
    pass


class ConfigError(WqedError):
    """Command-line or config-file usage error (exit code 2)."""

    def __init__(self, message, token=None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


class UnknownKey(ConfigError):
    pass


class MalformedValue(ConfigError):
    pass


class MissingCommand(ConfigError):
    pass
