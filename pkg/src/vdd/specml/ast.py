"""AST for contexts, machines, and the shared expression language.

Spans are carried for diagnostics but excluded from equality, so structural
comparison (and the parse/print round-trip property) ignores formatting.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from vdd.errors import NO_SPAN, SourceSpan


def _span_field() -> SourceSpan:
    return field(default=NO_SPAN, compare=False, repr=False)  # type: ignore[return-value]


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Name(Expr):
    name: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class PreName(Expr):
    """`v$0`: the pre-state value of v, legal only inside a BA atom."""

    name: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SetLit(Expr):
    """`{a, b}`; `{}` is the polymorphic empty collection; a literal whose
    items are all maplets denotes a finite map."""

    items: tuple[Expr, ...]
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Maplet(Expr):
    left: Expr
    right: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "-" | "not"
    operand: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Quantifier(Expr):
    kind: str  # "forall" | "exists"
    vars: tuple[tuple[str, "TypeExpr | None"], ...]
    body: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Call(Expr):
    """Builtin call (card, dom, ran, DIST) or finite-map application."""

    func: str
    args: tuple[Expr, ...]
    span: SourceSpan = _span_field()


# ---------------------------------------------------------------------------
# Type expressions (unresolved; resolution needs the constant environment)


@dataclass(frozen=True)
class TypeExpr:
    pass


@dataclass(frozen=True)
class TBool(TypeExpr):
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TInt(TypeExpr):
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TRange(TypeExpr):
    lo: Expr
    hi: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TName(TypeExpr):
    name: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TSetOf(TypeExpr):
    elem: TypeExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TMap(TypeExpr):
    dom: TypeExpr
    ran: TypeExpr
    total: bool = False
    span: SourceSpan = _span_field()


# ---------------------------------------------------------------------------
# Contexts and machines


@dataclass(frozen=True)
class CarrierSet:
    name: str
    elements: tuple[str, ...]
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ConstantDef:
    name: str
    value: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ContextSpec:
    name: str
    sets: tuple[CarrierSet, ...]
    constants: tuple[ConstantDef, ...]
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: TypeExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class InvariantDef:
    label: str
    pred: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class GlueDef:
    var: str
    expr: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ParamDecl:
    name: str
    type: TypeExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class Assignment:
    var: str
    expr: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class EventSpec:
    name: str
    params: tuple[ParamDecl, ...]
    guards: tuple[Expr, ...]
    actions: tuple[Assignment, ...]
    span: SourceSpan = _span_field()


INIT_EVENT = "INITIALISATION"


@dataclass(frozen=True)
class MachineSpec:
    name: str
    refines: str | None
    sees: tuple[str, ...]
    implements: tuple[str, ...]
    glue: tuple[GlueDef, ...]
    variables: tuple[VarDecl, ...]
    invariants: tuple[InvariantDef, ...]
    events: tuple[EventSpec, ...]
    span: SourceSpan = _span_field()

    def event(self, name: str) -> EventSpec | None:
        for ev in self.events:
            if ev.name == name:
                return ev
        return None

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)
