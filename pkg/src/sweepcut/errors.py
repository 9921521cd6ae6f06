"""Exception and warning types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An input violates the mathematical preconditions of an operation."""


class CapacityError(ValueError):
    """An input is too large for an exhaustive or dense computation."""


class ParseError(ValueError):
    """Malformed edge-list or partition text.

    ``line`` holds the 1-based line number when the error is tied to a line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LowDegreeWarning(UserWarning):
    """Some vertex has weighted degree below 1.

    Several normalization arguments are simplest when every vertex has
    weighted degree at least 1. Nothing in this package depends on it, so
    this is informational only.
    """
