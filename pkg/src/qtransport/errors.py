"""Exception hierarchy shared by all modules."""


class QTransportError(Exception):
    """Base class for every error raised by the package."""


class DomainError(QTransportError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(QTransportError, ValueError):
    """Model or reservoir configuration is malformed."""


class PreconditionError(QTransportError, ValueError):
    """A closed form was requested outside the regime where it holds."""


class DegenerateModelError(QTransportError, ArithmeticError):
    """A closed form has a vanishing denominator (e.g. all couplings zero)."""


class AmbiguityError(QTransportError, ArithmeticError):
    """The stationary state is not unique on the requested subspace."""

    def __init__(self, dimension: int, message: str | None = None):
        self.dimension = dimension
        super().__init__(message or f"kernel dimension is {dimension}, expected 1")


class IntegrationQualityError(QTransportError, ArithmeticError):
    """Time integration lost trace or positivity; a smaller step is needed."""


class FitError(QTransportError, ArithmeticError):
    """Exponential fit of a relaxation tail failed."""
