"""Exception hierarchy shared by the library and the CLI."""


class InfrateError(Exception):
    """Base class for all errors raised by infrate."""


class DomainError(InfrateError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class RateDomainError(DomainError):
    """``1 + rate`` is not strictly positive somewhere it must be."""


class IntegrandDomainError(DomainError):
    """The integrand returned a non-finite value at a quadrature node."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class PositivityError(DomainError):
    """A fitted CPI model is not strictly positive on its domain."""


class AccuracyError(InfrateError, ArithmeticError):
    """A requested tolerance could not be met.

    The best available estimate is kept on the exception so callers can
    decide whether it is usable.
    """

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class CsvParseError(InfrateError, ValueError):
    """Malformed CPI input; ``line`` is 1-based (None for whole-file problems)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InfeasibleStartError(RateDomainError):
    """No optimizer iterate kept ``1 + rate`` positive."""
