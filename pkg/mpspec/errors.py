"""
Exception hierarchy for mpspec
"""


class MPSpecError(Exception):
    """Base class for every error raised by the toolkit."""


class UnsupportedCapabilityError(MPSpecError):
    """A weight or function lacks the capability an operation needs."""


class DomainError(MPSpecError, ValueError):
    """An argument lies outside the domain of an operation."""


class IntegrationError(MPSpecError):
    """A quadrature did not converge or the integral diverges."""


class ResourceError(MPSpecError):
    """A requested size exceeds the configured budget."""


class ContractError(MPSpecError):
    """A precondition of a lemma-level check is violated."""


class PreconditionError(MPSpecError, ValueError):
    """Arguments are inconsistent with each other."""


class ResolutionError(MPSpecError):
    """The truncation leaves too much mass in the tail; increase N."""

    def __init__(self, message, suggested_n=None):
        super().__init__(message)
        self.suggested_n = suggested_n


class NumericError(MPSpecError):
    """A numerical kernel failed; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
