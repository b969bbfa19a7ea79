"""Exceptions shared across modules."""


class ParseError(ValueError):
    """Raised when a file or text encoding cannot be parsed or fails validation."""
