"""Canonical text rendering for specs and expressions.

The output is deterministic and re-parses to a structurally equal tree, so it
doubles as the hashing surface for change detection.
"""
from __future__ import annotations

from vdd.specml import ast

# Binding tightness; higher binds tighter.  Quantifiers are loosest (0).
_IMPLIES, _OR, _AND, _NOT, _CMP, _MAPLET, _RANGE, _SET, _ADD, _MUL, _NEG, _ATOM = range(1, 13)

_BINARY_LEVEL = {
    "=>": _IMPLIES,
    "or": _OR,
    "&": _AND,
    "=": _CMP, "/=": _CMP, "<": _CMP, "<=": _CMP, ">": _CMP, ">=": _CMP,
    ":": _CMP, "/:": _CMP, "<:": _CMP,
    "..": _RANGE,
    "\\/": _SET, "/\\": _SET, "\\": _SET, "<+": _SET,
    "+": _ADD, "-": _ADD,
    "*": _MUL, "/": _MUL, "mod": _MUL,
}
_RIGHT_ASSOC = {"=>"}
_NON_ASSOC = {"=", "/=", "<", "<=", ">", ">=", ":", "/:", "<:", ".."}


def print_expression(expr: ast.Expr) -> str:
    return _expr(expr, 0)


def _expr(e: ast.Expr, context: int) -> str:
    text, level = _render(e)
    if level < context:
        return f"({text})"
    return text


def _render(e: ast.Expr) -> tuple[str, int]:
    if isinstance(e, ast.IntLit):
        return str(e.value), _ATOM
    if isinstance(e, ast.BoolLit):
        return ("true" if e.value else "false"), _ATOM
    if isinstance(e, ast.Name):
        return e.name, _ATOM
    if isinstance(e, ast.PreName):
        return f"{e.name}$0", _ATOM
    if isinstance(e, ast.SetLit):
        return "{" + ", ".join(_expr(i, 0) for i in e.items) + "}", _ATOM
    if isinstance(e, ast.Maplet):
        left = _expr(e.left, _MAPLET + 1)
        right = _expr(e.right, _MAPLET)
        return f"{left} |-> {right}", _MAPLET
    if isinstance(e, ast.Unary):
        if e.op == "not":
            return f"not {_expr(e.operand, _NOT)}", _NOT
        return f"-{_expr(e.operand, _NEG)}", _NEG
    if isinstance(e, ast.Binary):
        level = _BINARY_LEVEL[e.op]
        if e.op in _RIGHT_ASSOC:
            lctx, rctx = level + 1, level
        elif e.op in _NON_ASSOC:
            lctx, rctx = level + 1, level + 1
        else:
            lctx, rctx = level, level + 1
        return f"{_expr(e.left, lctx)} {e.op} {_expr(e.right, rctx)}", level
    if isinstance(e, ast.Quantifier):
        vars_ = ", ".join(
            name if vtype is None else f"{name} : {print_type(vtype)}"
            for name, vtype in e.vars
        )
        return f"{e.kind} {vars_} . {_expr(e.body, 0)}", 0
    if isinstance(e, ast.Call):
        return f"{e.func}(" + ", ".join(_expr(a, 0) for a in e.args) + ")", _ATOM
    raise TypeError(f"cannot print {type(e).__name__}")


def print_type(t: ast.TypeExpr) -> str:
    if isinstance(t, ast.TBool):
        return "bool"
    if isinstance(t, ast.TInt):
        return "int"
    if isinstance(t, ast.TRange):
        return f"{_expr(t.lo, _SET)} .. {_expr(t.hi, _SET)}"
    if isinstance(t, ast.TName):
        return t.name
    if isinstance(t, ast.TSetOf):
        return f"set of {print_type(t.elem)}"
    if isinstance(t, ast.TMap):
        head = "total map" if t.total else "map"
        return f"{head} {print_type(t.dom)} -> {print_type(t.ran)}"
    raise TypeError(f"cannot print {type(t).__name__}")


def print_context(ctx: ast.ContextSpec) -> str:
    lines = [f"context {ctx.name}"]
    for s in ctx.sets:
        lines.append(f"  set {s.name} = {{ {', '.join(s.elements)} }}")
    for c in ctx.constants:
        lines.append(f"  constant {c.name} = {print_expression(c.value)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def print_machine(mch: ast.MachineSpec) -> str:
    lines = [f"machine {mch.name}"]
    if mch.refines:
        lines.append(f"  refines {mch.refines}")
    if mch.sees:
        lines.append(f"  sees {', '.join(mch.sees)}")
    if mch.implements:
        lines.append(f"  implements {', '.join(mch.implements)}")
    for g in mch.glue:
        lines.append(f"  glue {g.var} = {print_expression(g.expr)}")
    if mch.variables:
        lines.append("  variables")
        for v in mch.variables:
            lines.append(f"    {v.name} : {print_type(v.type)}")
    if mch.invariants:
        lines.append("  invariants")
        for inv in mch.invariants:
            lines.append(f"    {inv.label}: {print_expression(inv.pred)}")
    if mch.events:
        lines.append("  events")
        for ev in mch.events:
            lines.append(f"    event {ev.name}")
            if ev.params:
                decls = ", ".join(f"{p.name} : {print_type(p.type)}" for p in ev.params)
                lines.append(f"      any {decls}")
            for g in ev.guards:
                lines.append(f"      when {print_expression(g)}")
            lines.append("      then")
            for a in ev.actions:
                lines.append(f"        {a.var} := {print_expression(a.expr)}")
            lines.append("    end")
        lines.append("  end")
    lines.append("end")
    return "\n".join(lines) + "\n"
