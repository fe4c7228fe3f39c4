"""Exception hierarchy shared by every module of the package."""


class PossallocError(Exception):
    """Base class for all errors raised by possalloc."""


class InvalidParameterError(PossallocError, ValueError):
    pass


class DomainError(PossallocError, ValueError):
    """A value falls outside the domain where it can be evaluated."""


class EvaluationError(PossallocError, ArithmeticError):
    """A quadrature or function evaluation produced a non-finite value."""


class UnsupportedConfigurationError(PossallocError):
    pass


class IndicatorUndefinedError(PossallocError, ZeroDivisionError):
    """A risk indicator has a vanishing denominator."""


class DegenerateModelError(PossallocError):
    """The portfolio model has zero variance or zero risk aversion."""


class ConcavityError(PossallocError, ValueError):
    pass


class NoInteriorOptimumError(PossallocError):
    """The first-order condition has no sign change inside the domain."""

    def __init__(self, message, boundary=None, v_prime_at_boundary=None):
        super().__init__(message)
        self.boundary = boundary
        self.v_prime_at_boundary = v_prime_at_boundary


class ConfigError(PossallocError):
    pass
