"""Exception types raised across the package."""


class FtnNomaError(Exception):
    """Base class for all package errors."""


class DomainError(FtnNomaError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(FtnNomaError, ArithmeticError):
    """A numerical routine produced a non-finite value."""


class SizeError(FtnNomaError, ValueError):
    """A problem instance is too large for an exhaustive routine."""


class ConstructionError(FtnNomaError, RuntimeError):
    """A precoder or combiner could not be built for a channel draw."""


class ConfigError(FtnNomaError, ValueError):
    """An experiment configuration is malformed or out of range."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
