""" Exception types raised by the Shift Density Tool.

Library functions raise these; only the command line front end maps them
to exit codes.
"""

from typing import Optional


class SdtError(Exception):
    """Base class for all errors raised by sdt."""


class InvalidArgumentError(SdtError, ValueError):
    """An argument is outside the range an operation accepts."""


class DegenerateInputError(SdtError, ValueError):
    """The input makes the requested quantity undefined or unbounded."""


class PanelFormatError(SdtError, ValueError):
    """A panel or shifts CSV file is malformed.

    Attributes:
        row: 1-based line number in the file, header included, if known.
        column: Name of the offending column, if known.
    """

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.row = row
        self.column = column


class ConfigError(SdtError, ValueError):
    """A configuration value failed validation.

    Attributes:
        path: The configuration file the value was read from.
        line: 1-based line number of the offending key, if known.
    """

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        prefix = ""
        if path is not None:
            prefix = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{prefix}{message}")
        self.path = path
        self.line = line
