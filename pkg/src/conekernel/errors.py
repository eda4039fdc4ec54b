"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedDimensionError(DomainError):
    """The operation is only implemented for a restricted set of dimensions."""


class ContractViolation(RuntimeError):
    """A runtime check on a user-supplied object failed."""


class HorizonTooShortError(DomainError):
    """Too many simulated paths were censored at the time horizon."""


class QuadratureError(ArithmeticError):
    """A numerical integral failed its own accuracy checks."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or violates a constraint."""
