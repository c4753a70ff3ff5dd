"""Exception hierarchy shared by every stage of the checker.

Each error carries a ``kind`` string (stable, used by the corpus manifest and
the CLI report) and an optional source location that the driver fills in when
the error escapes a declaration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class LampiError(Exception):
    kind = "Error"

    def __init__(self, message: str, location: Optional[SourceLocation] = None,
                 kind: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.location = location
        if kind is not None:
            self.kind = kind

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location else ""
        return f"{where}{self.kind}: {self.message}"


class LexError(LampiError):
    kind = "LexError"


class ParseError(LampiError):
    kind = "SyntaxError"


class ScopeError(LampiError):
    """Unknown identifier, unbound rule variable, shadowing."""

    kind = "ScopeError"


class SignatureError(LampiError):
    """Duplicate declaration, unknown symbol, rule on a static symbol."""

    kind = "SignatureError"


class TypingError(LampiError):
    """``kind`` is one of SortError, Mismatch, UnannotatedLambdaInInferMode,
    NotAProduct, UnboundVariable, KindMisuse."""

    kind = "TypingError"

    def __init__(self, kind: str, message: str, term=None, expected=None,
                 found=None, location: Optional[SourceLocation] = None):
        super().__init__(message, location, kind)
        self.term = term
        self.expected = expected
        self.found = found


class RuleError(LampiError):
    """``kind`` is one of NotAPattern, StaticHead, UnificationClash,
    OccursCheck, UnsolvableWithoutGuard, ArityOverflow."""

    kind = "RuleError"


class GuardViolation(LampiError):
    kind = "GuardViolation"


class StepBudgetExceeded(LampiError):
    kind = "StepBudgetExceeded"


class DirectiveFailure(LampiError):
    """A ``#CONV`` whose two sides are not convertible."""

    kind = "ConvFailure"


class RequireError(LampiError):
    kind = "RequireError"
