"""Tree shapes for requirements, validation obligations, and LTL formulas.

A validation obligation (`VODecl`) names a requirement/machine pair and an
expression tree whose leaves are validation tasks.  Task parameters reuse the
machine language's expression AST so predicates share one evaluator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from vdd.errors import NO_SPAN, SourceSpan
from vdd.specml import ast as mast


def _span_field():
    return field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Requirement:
    """One `REQid: text` line of a requirements file."""

    id: str
    text: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class VOId:
    """The `REQ/Machine` head of an obligation."""

    requirement: str
    model: str

    def __str__(self) -> str:
        return f"{self.requirement}/{self.model}"

    @staticmethod
    def parse(text: str) -> "VOId":
        req, sep, model = text.partition("/")
        if not sep or not req or not model:
            raise ValueError(f"not a REQ/Machine id: {text!r}")
        return VOId(req, model)


# ---------------------------------------------------------------------------
# LTL formulas


class Formula:
    """Base class for temporal formulas."""


@dataclass(frozen=True)
class StateAtom(Formula):
    """`{p}`: the predicate p holds in the current state."""

    pred: mast.Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class BaAtom(Formula):
    """`BA(p)`: p relates the current state to its successor; `v$0` is pre."""

    pred: mast.Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Globally(Formula):
    """`G f`."""

    arg: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Eventually(Formula):
    """`F f`."""

    arg: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Next(Formula):
    """`X f`."""

    arg: Formula
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Until(Formula):
    """`f U g`."""

    left: Formula
    right: Formula
    span: SourceSpan = _span_field()


# ---------------------------------------------------------------------------
# Validation tasks and obligation expressions


class VOExpr:
    """Base class for obligation expression trees."""


@dataclass(frozen=True)
class LtlTask(VOExpr):
    """Model-check a temporal formula over all runs."""

    formula: Formula
    label: str | None = None
    scope: tuple[str, ...] | None = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class InvTask(VOExpr):
    """Check a state predicate over every considered state."""

    pred: mast.Expr
    label: str | None = None
    scope: tuple[str, ...] | None = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TraceStep(VOExpr):
    """One event occurrence in a scenario, optionally with argument values."""

    event: str
    args: tuple[mast.Expr, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TraceTask(VOExpr):
    """Animate a scenario; the optional final predicate is checked at the end."""

    steps: tuple[TraceStep, ...]
    final: mast.Expr | None = None
    label: str | None = None
    scope: tuple[str, ...] | None = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ExistsTask(VOExpr):
    """Search for a reachable state satisfying a predicate."""

    pred: mast.Expr
    label: str | None = None
    scope: tuple[str, ...] | None = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class AndExpr(VOExpr):
    left: VOExpr
    right: VOExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class OrExpr(VOExpr):
    left: VOExpr
    right: VOExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SeqExpr(VOExpr):
    """`left ; right`: right starts from the states left passed through."""

    left: VOExpr
    right: VOExpr
    span: SourceSpan = _span_field()


TASK_TYPES = (LtlTask, InvTask, TraceTask, ExistsTask)


def is_task(e: VOExpr) -> bool:
    return isinstance(e, TASK_TYPES)


def tasks(e: VOExpr) -> list[VOExpr]:
    """All task leaves of an expression tree, left to right."""
    if is_task(e):
        return [e]
    assert isinstance(e, (AndExpr, OrExpr, SeqExpr))
    return tasks(e.left) + tasks(e.right)


@dataclass(frozen=True)
class VODecl:
    """A full obligation declaration `REQ/Machine: expr`."""

    id: VOId
    expr: VOExpr
    span: SourceSpan = _span_field()
