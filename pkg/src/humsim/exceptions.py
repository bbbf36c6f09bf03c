"""Exception types raised by humsim."""


class DomainError(ValueError):
    """An argument lies outside the domain where a model is defined."""


class NonPhysicalFitError(ValueError):
    """A regression produced parameters with no physical meaning."""


class DataError(ValueError):
    """Input data could not be parsed or is inconsistent.

    ``line`` carries the 1-based line number of the offending row when the
    data came from a file.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(RuntimeError):
    """The optimizer could not start or made no usable progress."""
