"""Exception types shared across the package."""


class BulbnetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BulbnetError):
    """A configuration object violates its invariants."""


class UsageError(BulbnetError):
    """An operation was called with arguments that break its contract."""


class StateError(BulbnetError):
    """The network is in the wrong lifecycle state for the operation."""


class DataFormatError(BulbnetError):
    """An input file does not match the expected layout."""


class ParseError(DataFormatError):
    """A data file contains a malformed row."""

    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number
