"""Exception types shared across the package.

The CLI maps these onto exit codes: argument problems exit 2, numeric
failures exit 3, I/O problems exit 4.
"""


class AiryRelaxError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(AiryRelaxError, ValueError):
    """A precondition on an operation's inputs was violated."""


class DomainOverflowError(AiryRelaxError):
    """Evaluation left the supported envelope (under/overflow or |z| too large)."""


class ConvergenceError(AiryRelaxError):
    """An iterative or adaptive scheme failed to converge.

    Attributes
    ----------
    context : dict
        Diagnostic payload (iteration counts, indices, last residuals).
    """

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class ConditionViolationError(AiryRelaxError):
    """A configuration failed the admissibility conditions required here."""
