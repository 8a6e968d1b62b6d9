"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class HypergraphError(Exception):
    """Base class for errors raised by hyperctrl."""


class ValidationError(HypergraphError, ValueError):
    """Input violates a structural invariant (index range, tail size, ...)."""


class ParseError(ValidationError):
    """A hypergraph file could not be decoded."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class CapacityError(HypergraphError):
    """An exponential or dense routine was asked to run beyond its size cap."""
