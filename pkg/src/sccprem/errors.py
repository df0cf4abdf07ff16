"""Exception hierarchy shared across the package.

Three broad families map onto distinct CLI exit codes: configuration
problems (bad or missing settings), data problems (unreadable or invalid
input files), and numeric problems (domain violations, degenerate fits).
"""


class SccError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(SccError):
    """Invalid, inconsistent, or missing configuration."""

    exit_code = 2


class DataError(SccError):
    """Input data missing, malformed, or failing schema checks."""

    exit_code = 3


class NumericError(SccError):
    """Numeric domain violations and degenerate computations."""

    exit_code = 4


class SchemaError(DataError):
    """A file's header or column set does not match the documented schema."""


class AlignmentError(DataError):
    """Two inputs that must share a year grid do not."""


class DomainError(NumericError):
    """A value left the mathematical domain of an operation."""


class DegenerateFitError(NumericError):
    """An estimation problem has no usable solution on the given data."""
