"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class CsatError(Exception):
    """Base class for all errors raised by nilcsat."""

    exit_code = 1


class UsageError(CsatError, ValueError):
    """Caller passed incoherent arguments (mismatched fields, bad arity, ...)."""

    exit_code = 1


class DomainError(CsatError, ValueError):
    """Input is outside the mathematical domain of an operation."""

    exit_code = 1


class FormatError(CsatError, ValueError):
    """Malformed text in one of the file formats."""

    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceError(CsatError, RuntimeError):
    """An exhaustive operation would exceed the configured limit."""

    exit_code = 3


class BudgetError(ResourceError):
    """A solver ran out of its time or candidate budget. Never an answer."""

    exit_code = 3
