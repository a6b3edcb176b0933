"""Exception hierarchy shared by all modules."""


class QfpeError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(QfpeError, ValueError):
    pass


class DomainError(QfpeError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class NormalizationError(QfpeError, ValueError):
    pass


class NumericalConsistencyError(QfpeError, ArithmeticError):
    """A computed quantity violated an invariant it must satisfy up to round-off."""


class SimulatorCapError(QfpeError):
    pass
