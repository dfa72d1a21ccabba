"""Diagnostics and error types shared by every module.

Stable error codes are part of the tool's contract: messages may be reworded,
codes may not.  Codes are grouped by area (FRAME, PLAN, PARSE, TYPE, EVAL,
VO, ENG, LED, PROJ, IO).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SourceSpan:
    """A location in a source file; line and column are 1-based."""

    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NO_SPAN = SourceSpan("<none>", 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan = NO_SPAN
    severity: Severity = Severity.ERROR

    def __str__(self) -> str:
        return f"{self.span}: {self.severity} {self.code} {self.message}"


class VddError(Exception):
    """Base for all raised tool errors; carries a stable code and a span."""

    def __init__(self, code: str, message: str, span: SourceSpan = NO_SPAN):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.span = span

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, self.message, self.span)


class ParseError(VddError):
    """Syntax error with line/column information."""


class FrameError(VddError):
    """Problem-frame well-formedness error."""


class PlanError(VddError):
    """Refinement-plan derivation error (nesting, cycles, orphans)."""


class TypeCheckError(VddError):
    """Static well-formedness error (unknown name, non-finite type, ...)."""


class EvalError(VddError):
    """Runtime expression-evaluation error (e.g. division by zero in an action)."""


class EngineError(VddError):
    """Validation-engine error (unresolved formula, empty SEQ carrier, ...)."""


class LedgerError(VddError):
    """Ledger bookkeeping error (hash mismatch, stage prerequisite unmet)."""


class ProjectError(VddError):
    """Manifest or cross-file consistency error (duplicates, dangling names)."""
