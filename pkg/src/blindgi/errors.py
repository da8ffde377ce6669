"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: config/usage problems exit 2,
data and file-format problems exit 3, numerical failures exit 4.
"""


class BlindGIError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(BlindGIError):
    """Invalid configuration or incompatible geometry (exit code 2)."""


class UsageError(BlindGIError):
    """Invalid arguments to an operation or CLI call (exit code 2)."""


class DataError(BlindGIError):
    """Input data violates a contract, e.g. non-finite or negative values (exit code 3)."""


class FormatError(BlindGIError):
    """A file does not conform to one of the on-disk formats (exit code 3)."""


class NumericalError(BlindGIError):
    """A numerical procedure failed, e.g. empty support or undefined correlation (exit code 4)."""
