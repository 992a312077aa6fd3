from __future__ import annotations

from typing import Any, Dict, Optional


class StallingsError(Exception):
    """Base class for every error raised by the library."""


class LexicalError(StallingsError, ValueError):
    def __init__(self, char: str, position: int, text: str = ""):
        self.char = char
        self.position = position
        self.text = text
        super().__init__(f"Unknown symbol {char!r} at position {position} in {text!r}")


class DomainError(StallingsError, ValueError):
    pass


class StructuralError(StallingsError, ValueError):
    pass


class GraphParseError(StallingsError, ValueError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class PreconditionError(StallingsError, ValueError):
    pass


class SchemeError(StallingsError, ValueError):
    pass


class SamplingError(StallingsError, RuntimeError):
    pass


class BudgetExhausted(StallingsError, RuntimeError):
    pass


class TheoremViolation(StallingsError, RuntimeError):
    """Raised when a proven inequality or identity fails; always an implementation bug."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.details = details or {}
        super().__init__(message)
