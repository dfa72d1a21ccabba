"""Canonical text for requirements and obligations.

As with the machine language, the printed form is what gets hashed for
change detection, so rendering must be deterministic: minimal parentheses,
single spaces, `G/F/X` runs collapsed into one prefix chain.
"""
from __future__ import annotations

from vdd.specml.printer import print_expression

from . import ast

# Obligation-level precedence.
_SEQ, _OR, _AND, _TASK = 1, 2, 3, 4

# Formula-level precedence.
_IMPL, _FOR, _FAND, _UNTIL, _PREFIX, _ATOM = 1, 2, 3, 4, 5, 6

_CHAIN_LETTER = {ast.Globally: "G", ast.Eventually: "F", ast.Next: "X"}


def print_requirements(reqs: tuple[ast.Requirement, ...]) -> str:
    return "".join(f"{r.id}: {r.text}\n" for r in reqs)


def print_vo(vo_id: ast.VOId, expr: ast.VOExpr) -> str:
    return f"{vo_id}: {print_vo_expr(expr)}"


def print_decl(decl: ast.VODecl) -> str:
    return print_vo(decl.id, decl.expr)


def print_vo_expr(expr: ast.VOExpr) -> str:
    text, _ = _vexpr(expr)
    return text


def print_formula(f: ast.Formula) -> str:
    text, _ = _formula(f)
    return text


def _vexpr(e: ast.VOExpr) -> tuple[str, int]:
    if isinstance(e, ast.SeqExpr):
        return f"{_vchild(e.left, _SEQ)} ; {_vchild(e.right, _SEQ + 1)}", _SEQ
    if isinstance(e, ast.OrExpr):
        return f"{_vchild(e.left, _OR)} or {_vchild(e.right, _OR + 1)}", _OR
    if isinstance(e, ast.AndExpr):
        return f"{_vchild(e.left, _AND)} & {_vchild(e.right, _AND + 1)}", _AND
    return _task(e), _TASK


def _vchild(e: ast.VOExpr, at_least: int) -> str:
    text, level = _vexpr(e)
    if level < at_least:
        return f"({text})"
    return text


def _task(t: ast.VOExpr) -> str:
    if isinstance(t, ast.LtlTask):
        body = print_formula(t.formula)
        if body.startswith("(") or _has_toplevel_connective(body):
            body = f"LTL({body})"
    elif isinstance(t, ast.InvTask):
        body = f"INV({print_expression(t.pred)})"
    elif isinstance(t, ast.ExistsTask):
        body = f"EXISTS({print_expression(t.pred)})"
    elif isinstance(t, ast.TraceTask):
        items = [_step(s) for s in t.steps]
        if t.final is not None:
            items.append("{" + print_expression(t.final) + "}")
        body = "TRACE(" + "; ".join(items) + ")"
    else:  # pragma: no cover - exhaustive over task types
        raise TypeError(f"not a task: {t!r}")
    if t.label is not None:
        body = f"{t.label} := {body}"
    if t.scope is not None:
        body = f"{body} @[{', '.join(t.scope)}]"
    return body


def _step(s: ast.TraceStep) -> str:
    if not s.args:
        return s.event
    return s.event + "(" + ", ".join(print_expression(a) for a in s.args) + ")"


def _has_toplevel_connective(text: str) -> bool:
    """True if `&` or `or` appears outside brackets, where the obligation
    grammar would claim it."""
    depth = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        elif depth == 0 and ch == "&":
            return True
        elif depth == 0 and text.startswith(" or ", i):
            return True
        i += 1
    return False


def _formula(f: ast.Formula) -> tuple[str, int]:
    if isinstance(f, ast.Implies):
        return f"{_fchild(f.left, _IMPL + 1)} => {_fchild(f.right, _IMPL)}", _IMPL
    if isinstance(f, ast.Or):
        return f"{_fchild(f.left, _FOR)} or {_fchild(f.right, _FOR + 1)}", _FOR
    if isinstance(f, ast.And):
        return f"{_fchild(f.left, _FAND)} & {_fchild(f.right, _FAND + 1)}", _FAND
    if isinstance(f, ast.Until):
        return f"{_fchild(f.left, _UNTIL + 1)} U {_fchild(f.right, _UNTIL)}", _UNTIL
    if isinstance(f, ast.Not):
        return f"not {_fchild(f.arg, _PREFIX)}", _PREFIX
    if isinstance(f, (ast.Globally, ast.Eventually, ast.Next)):
        letters = []
        inner = f
        while isinstance(inner, (ast.Globally, ast.Eventually, ast.Next)):
            letters.append(_CHAIN_LETTER[type(inner)])
            inner = inner.arg
        text, _ = _formula(inner)
        return "".join(letters) + f"({text})", _ATOM
    if isinstance(f, ast.StateAtom):
        return "{" + print_expression(f.pred) + "}", _ATOM
    if isinstance(f, ast.BaAtom):
        return f"BA({print_expression(f.pred)})", _ATOM
    raise TypeError(f"not a formula: {f!r}")  # pragma: no cover


def _fchild(f: ast.Formula, at_least: int) -> str:
    text, level = _formula(f)
    if level < at_least:
        return f"({text})"
    return text
