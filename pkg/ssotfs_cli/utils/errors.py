"""Exception types raised by the simulation library.

All of them subclass ``ValueError`` so callers that only guard against bad
values keep working.
"""

from typing import Optional


class InvalidInputError(ValueError):
    """An argument has the wrong shape, range or content."""


class ConfigurationError(ValueError):
    """A configuration or policy request cannot be satisfied.

    Args:
        message: Human readable description.
        field: Dotted path of the offending config entry, when known.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class UnsupportedInputError(ValueError):
    """The input is valid but the requested routine cannot handle it."""
