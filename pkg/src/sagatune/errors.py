"""Exception types shared across the package."""


class SagatuneError(Exception):
    """Base class for all package errors."""


class ParseError(SagatuneError, ValueError):
    """Malformed dataset text (carries the 1-based line number when known)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class DimensionError(SagatuneError, ValueError):
    """Shape or index constraint violated."""


class NumericalError(SagatuneError, RuntimeError):
    """Iterative routine failed to converge; carries the last estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class IntractableError(SagatuneError, RuntimeError):
    """Combinatorial enumeration would exceed the configured budget."""


class ValidationError(SagatuneError, ValueError):
    """Input data violates a documented precondition."""
