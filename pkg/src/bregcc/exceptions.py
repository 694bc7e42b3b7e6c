"""Exception types raised by the solvers."""


class BregmanError(Exception):
    """Base class for all library errors."""


class InputError(BregmanError, ValueError):
    """Malformed input: dimension mismatch, empty point lists, bad names."""


class DomainError(BregmanError, ValueError):
    """A point lies outside the domain required by an operation.

    ``coordinate`` holds the index of the first offending coordinate when it
    is known.
    """

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class UnsupportedFunctionError(BregmanError):
    """The function lacks a capability the operation needs."""


class NoProjectionError(BregmanError):
    """A Bregman projection could not be computed.

    ``diagnostics`` is a dict with the last iterate, residual norm and
    iteration count.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvariantViolation(BregmanError, RuntimeError):
    """An internal consistency check failed."""
