"""Parsers for `.req` requirement files and `.vo` obligation files.

Obligation connectives nest as: `;` binds loosest, then `or`, then `&`;
parentheses group.  A task leaf is either a keyword form (`LTL(...)`,
`INV(...)`, `TRACE(...)`, `EXISTS(...)`) or a bare temporal formula, may carry
a `label :=` prefix, and may pin its domain scope with `@[Domain, ...]`.

Because `&`, `or`, and `;` at bracket depth zero always belong to the
obligation level, a bare formula containing a top-level `&` is read as two
LTL tasks (which agrees with it under all-runs semantics); write `LTL(...)`
to keep such connectives inside one formula.
"""
from __future__ import annotations

import re

from vdd.errors import ParseError, SourceSpan
from vdd.specml.lexer import Token, TokenStream, tokenize
from vdd.specml.parser import parse_expr

from . import ast

_REQ_LINE = re.compile(r"^([A-Za-z_]\w*)\s*:\s*(.*)$")
_CHAIN = re.compile(r"^[GFX]+$")
_TASK_KEYWORDS = ("LTL", "INV", "TRACE", "EXISTS", "BA")


def parse_requirements(text: str, file: str = "<string>") -> tuple[ast.Requirement, ...]:
    """Parse `REQid: text` lines; `#` starts a comment, blank lines are skipped."""
    out: list[ast.Requirement] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        span = SourceSpan(file, lineno, 1)
        m = _REQ_LINE.match(line)
        if not m:
            raise ParseError("E-PARSE-001", "expected a 'REQid: text' line", span)
        rid, body = m.group(1), m.group(2).strip()
        if rid in seen:
            raise ParseError("E-PARSE-003", f"duplicate requirement id {rid!r}", span)
        seen.add(rid)
        out.append(ast.Requirement(rid, body, span=span))
    return tuple(out)


# ---------------------------------------------------------------------------
# Obligations


def parse_vo(text: str, file: str = "<string>") -> tuple[ast.VOId, ast.VOExpr]:
    """Parse a single `REQ/Machine: expr` declaration."""
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    decl = _parse_decl(ts)
    ts.skip_newlines()
    if not ts.at_end():
        raise ParseError("E-PARSE-001", "expected a single obligation", ts.span())
    return decl.id, decl.expr


def parse_vo_file(text: str, file: str = "<string>") -> tuple[ast.VODecl, ...]:
    """Parse a `.vo` file: one obligation per line."""
    ts = TokenStream(tokenize(text, file), file)
    decls: list[ast.VODecl] = []
    ts.skip_newlines()
    while not ts.at_end():
        decls.append(_parse_decl(ts))
        ts.expect_newline()
    return tuple(decls)


def _parse_decl(ts: TokenStream) -> ast.VODecl:
    head = ts.expect("name", what="requirement id")
    ts.expect("op", "/")
    model = ts.expect("name", what="machine name")
    ts.expect("op", ":")
    expr = _parse_seq(ts)
    span = head.span(ts.file)
    return ast.VODecl(ast.VOId(head.text, model.text), expr, span=span)


def _parse_seq(ts: TokenStream) -> ast.VOExpr:
    left = _parse_or(ts)
    while ts.check("op", ";"):
        span = ts.span()
        ts.advance()
        left = ast.SeqExpr(left, _parse_or(ts), span=span)
    return left


def _parse_or(ts: TokenStream) -> ast.VOExpr:
    left = _parse_and(ts)
    while ts.check("kw", "or"):
        span = ts.span()
        ts.advance()
        left = ast.OrExpr(left, _parse_and(ts), span=span)
    return left


def _parse_and(ts: TokenStream) -> ast.VOExpr:
    left = _parse_primary(ts)
    while ts.check("op", "&"):
        span = ts.span()
        ts.advance()
        left = ast.AndExpr(left, _parse_primary(ts), span=span)
    return left


def _parse_primary(ts: TokenStream) -> ast.VOExpr:
    if ts.check("op", "("):
        ts.advance()
        inner = _parse_seq(ts)
        ts.expect("op", ")")
        return inner
    label = None
    if ts.check("name") and ts.peek(1).kind == "op" and ts.peek(1).text == ":=":
        label = ts.advance().text
        ts.advance()
    task = _parse_task(ts, label)
    if ts.check("op", "@"):
        task = _with_scope(ts, task)
    return task


def _with_scope(ts: TokenStream, task: ast.VOExpr) -> ast.VOExpr:
    ts.expect("op", "@")
    ts.expect("op", "[")
    names = [ts.expect("name", what="domain name").text]
    while ts.accept("op", ","):
        names.append(ts.expect("name", what="domain name").text)
    ts.expect("op", "]")
    scope = tuple(names)
    if isinstance(task, ast.LtlTask):
        return ast.LtlTask(task.formula, task.label, scope, span=task.span)
    if isinstance(task, ast.InvTask):
        return ast.InvTask(task.pred, task.label, scope, span=task.span)
    if isinstance(task, ast.TraceTask):
        return ast.TraceTask(task.steps, task.final, task.label, scope, span=task.span)
    if isinstance(task, ast.ExistsTask):
        return ast.ExistsTask(task.pred, task.label, scope, span=task.span)
    raise ParseError("E-PARSE-001", "scope suffix only applies to a task", ts.span())


def _parse_task(ts: TokenStream, label: str | None) -> ast.VOExpr:
    tok = ts.peek()
    span = tok.span(ts.file)
    if tok.kind == "name" and tok.text in ("INV", "EXISTS") and ts.peek(1).text == "(":
        ts.advance()
        ts.expect("op", "(")
        pred = parse_expr(ts)
        ts.expect("op", ")")
        if tok.text == "INV":
            return ast.InvTask(pred, label, span=span)
        return ast.ExistsTask(pred, label, span=span)
    if tok.kind == "name" and tok.text == "TRACE" and ts.peek(1).text == "(":
        ts.advance()
        return _parse_trace(ts, label, span)
    if tok.kind == "name" and tok.text == "LTL" and ts.peek(1).text == "(":
        ts.advance()
        ts.expect("op", "(")
        formula = _parse_formula(ts)
        ts.expect("op", ")")
        return ast.LtlTask(formula, label, span=span)
    return ast.LtlTask(_parse_formula_bare(ts), label, span=span)


def _parse_trace(ts: TokenStream, label: str | None, span: SourceSpan) -> ast.TraceTask:
    ts.expect("op", "(")
    steps: list[ast.TraceStep] = []
    final = None
    if not ts.check("op", ")"):
        while True:
            if ts.check("op", "{"):
                ts.advance()
                final = parse_expr(ts)
                ts.expect("op", "}")
                break
            steps.append(_parse_step(ts))
            if not ts.accept("op", ";"):
                break
    ts.expect("op", ")")
    return ast.TraceTask(tuple(steps), final, label, span=span)


def _parse_step(ts: TokenStream) -> ast.TraceStep:
    tok = ts.expect("name", what="event name")
    args: list = []
    if ts.accept("op", "("):
        if not ts.check("op", ")"):
            args.append(parse_expr(ts))
            while ts.accept("op", ","):
                args.append(parse_expr(ts))
        ts.expect("op", ")")
    return ast.TraceStep(tok.text, tuple(args), span=tok.span(ts.file))


# ---------------------------------------------------------------------------
# Temporal formulas

# Precedence, loosest first: => | or | & | U | prefix (not, G/F/X chains).


def _parse_formula(ts: TokenStream) -> ast.Formula:
    left = _parse_f_or(ts)
    if ts.check("op", "=>"):
        span = ts.span()
        ts.advance()
        return ast.Implies(left, _parse_formula(ts), span=span)
    return left


def _parse_formula_bare(ts: TokenStream) -> ast.Formula:
    """A task-position formula: `&` and `or` are left to the obligation level."""
    left = _parse_until(ts)
    if ts.check("op", "=>"):
        span = ts.span()
        ts.advance()
        return ast.Implies(left, _parse_formula_bare(ts), span=span)
    return left


def _parse_f_or(ts: TokenStream) -> ast.Formula:
    left = _parse_f_and(ts)
    while ts.check("kw", "or"):
        span = ts.span()
        ts.advance()
        left = ast.Or(left, _parse_f_and(ts), span=span)
    return left


def _parse_f_and(ts: TokenStream) -> ast.Formula:
    left = _parse_until(ts)
    while ts.check("op", "&"):
        span = ts.span()
        ts.advance()
        left = ast.And(left, _parse_until(ts), span=span)
    return left


def _parse_until(ts: TokenStream) -> ast.Formula:
    left = _parse_unary(ts)
    if ts.at_word("U"):
        span = ts.span()
        ts.advance()
        return ast.Until(left, _parse_until(ts), span=span)
    return left


def _parse_unary(ts: TokenStream) -> ast.Formula:
    tok = ts.peek()
    if tok.kind == "kw" and tok.text == "not":
        ts.advance()
        return ast.Not(_parse_unary(ts), span=tok.span(ts.file))
    if tok.kind == "name" and _CHAIN.match(tok.text) and tok.text not in _TASK_KEYWORDS:
        ts.advance()
        inner = _parse_unary(ts)
        for letter in reversed(tok.text):
            span = tok.span(ts.file)
            if letter == "G":
                inner = ast.Globally(inner, span=span)
            elif letter == "F":
                inner = ast.Eventually(inner, span=span)
            else:
                inner = ast.Next(inner, span=span)
        return inner
    return _parse_atom(ts)


def _parse_atom(ts: TokenStream) -> ast.Formula:
    tok = ts.peek()
    if ts.accept("op", "{"):
        pred = parse_expr(ts)
        ts.expect("op", "}")
        return ast.StateAtom(pred, span=tok.span(ts.file))
    if tok.kind == "name" and tok.text == "BA":
        ts.advance()
        ts.expect("op", "(")
        braced = ts.accept("op", "{")
        pred = parse_expr(ts)
        if braced:
            ts.expect("op", "}")
        ts.expect("op", ")")
        return ast.BaAtom(pred, span=tok.span(ts.file))
    if ts.accept("op", "("):
        inner = _parse_formula(ts)
        ts.expect("op", ")")
        return inner
    found = repr(tok.text) if tok.text.strip() else tok.kind
    raise ParseError(
        "E-PARSE-001",
        f"expected a formula atom ({{pred}}, BA(pred), or parentheses), found {found}",
        tok.span(ts.file),
    )
