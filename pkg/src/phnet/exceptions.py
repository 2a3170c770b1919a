"""Exception hierarchy.

Every error raised deliberately by the package derives from ``PhNetError`` so
callers (the CLI in particular) can map them to exit codes in one place.
"""


class PhNetError(Exception):
    """Base class for all package errors."""


class ShapeError(PhNetError, ValueError):
    """Operand dimensions do not conform."""


class NotPositiveDefinite(PhNetError, ArithmeticError):
    """A non-positive pivot was met during a Cholesky factorization."""


class ConfigError(PhNetError, ValueError):
    pass


class SchemaMismatch(PhNetError, ValueError):
    pass


class ParseError(PhNetError, ValueError):
    """A CSV cell could not be parsed.

    ``row`` is the 1-based data row (the header is not counted) and
    ``column`` the header name of the offending cell.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RangeError(PhNetError, ValueError):
    pass


class EmptyDataset(PhNetError, ValueError):
    pass


class EmptyInput(PhNetError, ValueError):
    pass


class TooFewSamples(PhNetError, ValueError):
    pass


class DegenerateVariance(PhNetError, ArithmeticError):
    """The observed series is constant, so a correlation is undefined."""


class ModelFormatError(PhNetError, ValueError):
    """A model file is unreadable or internally inconsistent."""
