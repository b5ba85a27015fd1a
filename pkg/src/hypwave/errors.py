"""Exception hierarchy shared by all hypwave modules."""


class HypwaveError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HypwaveError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole (for example the c-function at 0)."""


class PreconditionError(HypwaveError):
    """A documented precondition of an operation does not hold."""


class OutOfRangeError(DomainError):
    """A radius or frequency exceeds the configured working range."""


class SupportError(DomainError):
    """A spectral profile touches a region it must stay away from."""


class ConvergenceError(HypwaveError):
    """A numerical method could not reach the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TailError(ConvergenceError):
    """An improper integral does not converge under the declared tail model."""


class CertificateError(HypwaveError):
    """A machine-checked inequality certificate failed."""


class UsageError(HypwaveError):
    """Bad command line or configuration input."""
