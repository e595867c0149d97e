"""Exception hierarchy shared by every module."""


class RssiError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RssiError, ValueError):
    """Bad data: non-finite values, empty inputs, out-of-order timestamps."""


class FormatError(InputError):
    """A trace or report file does not follow its documented schema."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateInputError(InputError):
    """The data carries no variance, so a statistic is undefined."""


class ConfigurationError(RssiError, ValueError):
    """A parameter lies outside its admissible range."""
