from __future__ import annotations

from typing import Any, Dict, List, Optional


class TermalgError(Exception):
    """Base class for every error raised by termalg."""


class TermSyntaxError(TermalgError, ValueError):
    def __init__(self, message: str, offset: int = 0) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class SignatureError(TermalgError, ValueError):
    pass


class VariableFreeTermError(TermalgError, ValueError):
    pass


class InvalidPositionError(TermalgError, ValueError):
    pass


class CompositionError(TermalgError, ValueError):
    pass


class AlgebraError(TermalgError, ValueError):
    pass


class TheoryValidationError(TermalgError, ValueError):
    def __init__(self, message: str, errors: Optional[List[Dict[str, Any]]] = None) -> None:
        super().__init__(message)
        self.errors = errors or []


class BudgetError(TheoryValidationError):
    pass


class UnknownVerdictError(TermalgError, RuntimeError):
    """Raised when a strict consumer meets an Unknown verdict."""


class ProofScriptError(TermalgError, ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def field_error(field: str, message: str) -> Dict[str, Any]:
    return {"field": field, "message": message}
