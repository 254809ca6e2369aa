"""Exception hierarchy shared by all modules."""


class TruncdimError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(TruncdimError, ValueError):
    """Invalid parameters or an incompatible combination of them."""


class InvalidIndex(ConfigError):
    pass


class NonMonotoneWeights(ConfigError):
    pass


class IncompatibleSpec(ConfigError):
    pass


class DimensionTooLarge(TruncdimError):
    """Subset enumeration requested beyond the configured budget."""


class NoConvergence(TruncdimError):
    pass


class DivergenceError(TruncdimError):
    """A quantity that must be finite is provably infinite."""


class DivergentTail(DivergenceError):
    pass


class DivergentProduct(DivergenceError):
    pass


class DivergentIntegral(DivergenceError):
    pass


class Unreachable(DivergenceError):
    pass
