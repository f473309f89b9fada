"""Exception types shared across the package."""


class QpanetError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QpanetError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergenceError(QpanetError, RuntimeError):
    """A truncated series or scan hit its iteration cap before converging."""


class UndefinedConditionalError(QpanetError, ValueError):
    """A conditional distribution was requested for a zero-probability condition."""


class GraphParseError(QpanetError, ValueError):
    """An edge list or quality file failed to parse.

    Carries the offending line number (1-based) when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
