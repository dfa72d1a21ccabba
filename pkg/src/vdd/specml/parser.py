"""Recursive-descent parsers for contexts, machines, and expressions.

Declarations are line-oriented: one section header or declaration per line,
expressions do not span lines.  Operator precedence, loosest to tightest:

    =>   or   &   not   comparisons (= /= < <= > >= : /: <:)   |->   ..
    \\/ /\\ \\ <+   + -   * / mod   unary -   application/atoms

`forall`/`exists` bind their body as far right as possible and must be
parenthesized inside a larger expression.
"""
from __future__ import annotations

from vdd.errors import ParseError
from vdd.specml import ast
from vdd.specml.lexer import Token, TokenStream, tokenize

_COMPARISONS = ("=", "/=", "<", "<=", ">", ">=", ":", "/:", "<:")
_SET_OPS = ("\\/", "/\\", "\\", "<+")
_ADDITIVE = ("+", "-")
_MULTIPLICATIVE = ("*", "/")

BUILTINS = ("card", "dom", "ran", "DIST")


def _tok_span(ts: TokenStream, tok: Token):
    return tok.span(ts.file)


# ---------------------------------------------------------------------------
# Expressions


def parse_expr(ts: TokenStream) -> ast.Expr:
    if ts.check("kw", "forall") or ts.check("kw", "exists"):
        return _parse_quantifier(ts)
    return _parse_implies(ts)


def _parse_quantifier(ts: TokenStream) -> ast.Expr:
    tok = ts.advance()
    kind = tok.text
    vars_: list[tuple[str, ast.TypeExpr | None]] = []
    while True:
        name = ts.expect("name", what="quantified variable")
        vtype: ast.TypeExpr | None = None
        if ts.accept("op", ":"):
            vtype = parse_type(ts)
        vars_.append((name.text, vtype))
        if not ts.accept("op", ","):
            break
    ts.expect("op", ".", what="'.' after quantified variables")
    body = parse_expr(ts)
    return ast.Quantifier(kind, tuple(vars_), body, span=_tok_span(ts, tok))


def _parse_implies(ts: TokenStream) -> ast.Expr:
    left = _parse_or(ts)
    if ts.check("op", "=>"):
        tok = ts.advance()
        right = _parse_implies(ts)  # right-associative
        return ast.Binary("=>", left, right, span=_tok_span(ts, tok))
    return left


def _parse_or(ts: TokenStream) -> ast.Expr:
    left = _parse_and(ts)
    while ts.check("kw", "or"):
        tok = ts.advance()
        left = ast.Binary("or", left, _parse_and(ts), span=_tok_span(ts, tok))
    return left


def _parse_and(ts: TokenStream) -> ast.Expr:
    left = _parse_not(ts)
    while ts.check("op", "&"):
        tok = ts.advance()
        left = ast.Binary("&", left, _parse_not(ts), span=_tok_span(ts, tok))
    return left


def _parse_not(ts: TokenStream) -> ast.Expr:
    if ts.check("kw", "not"):
        tok = ts.advance()
        return ast.Unary("not", _parse_not(ts), span=_tok_span(ts, tok))
    return _parse_comparison(ts)


def _parse_comparison(ts: TokenStream) -> ast.Expr:
    left = _parse_maplet(ts)
    tok = ts.peek()
    if tok.kind == "op" and tok.text in _COMPARISONS:
        ts.advance()
        right = _parse_maplet(ts)
        return ast.Binary(tok.text, left, right, span=_tok_span(ts, tok))
    return left


def _parse_maplet(ts: TokenStream) -> ast.Expr:
    left = _parse_range(ts)
    if ts.check("op", "|->"):
        tok = ts.advance()
        right = _parse_maplet(ts)
        return ast.Maplet(left, right, span=_tok_span(ts, tok))
    return left


def _parse_range(ts: TokenStream) -> ast.Expr:
    left = _parse_set_tier(ts)
    if ts.check("op", ".."):
        tok = ts.advance()
        right = _parse_set_tier(ts)
        return ast.Binary("..", left, right, span=_tok_span(ts, tok))
    return left


def _parse_set_tier(ts: TokenStream) -> ast.Expr:
    left = _parse_additive(ts)
    while ts.peek().kind == "op" and ts.peek().text in _SET_OPS:
        tok = ts.advance()
        left = ast.Binary(tok.text, left, _parse_additive(ts), span=_tok_span(ts, tok))
    return left


def _parse_additive(ts: TokenStream) -> ast.Expr:
    left = _parse_multiplicative(ts)
    while ts.peek().kind == "op" and ts.peek().text in _ADDITIVE:
        tok = ts.advance()
        left = ast.Binary(tok.text, left, _parse_multiplicative(ts), span=_tok_span(ts, tok))
    return left


def _parse_multiplicative(ts: TokenStream) -> ast.Expr:
    left = _parse_unary(ts)
    while (ts.peek().kind == "op" and ts.peek().text in _MULTIPLICATIVE) or ts.check("kw", "mod"):
        tok = ts.advance()
        left = ast.Binary(tok.text, left, _parse_unary(ts), span=_tok_span(ts, tok))
    return left


def _parse_unary(ts: TokenStream) -> ast.Expr:
    if ts.check("op", "-"):
        tok = ts.advance()
        return ast.Unary("-", _parse_unary(ts), span=_tok_span(ts, tok))
    return _parse_primary(ts)


def _parse_primary(ts: TokenStream) -> ast.Expr:
    tok = ts.peek()
    if tok.kind == "int":
        ts.advance()
        return ast.IntLit(int(tok.text), span=_tok_span(ts, tok))
    if tok.kind == "kw" and tok.text in ("true", "false"):
        ts.advance()
        return ast.BoolLit(tok.text == "true", span=_tok_span(ts, tok))
    if tok.kind == "prename":
        ts.advance()
        return ast.PreName(tok.text, span=_tok_span(ts, tok))
    if tok.kind == "name":
        ts.advance()
        if ts.check("op", "("):
            ts.advance()
            args: list[ast.Expr] = []
            if not ts.check("op", ")"):
                args.append(parse_expr(ts))
                while ts.accept("op", ","):
                    args.append(parse_expr(ts))
            ts.expect("op", ")", what="')'")
            return ast.Call(tok.text, tuple(args), span=_tok_span(ts, tok))
        return ast.Name(tok.text, span=_tok_span(ts, tok))
    if tok.kind == "op" and tok.text == "(":
        ts.advance()
        inner = parse_expr(ts)
        ts.expect("op", ")", what="')'")
        return inner
    if tok.kind == "op" and tok.text == "{":
        ts.advance()
        items: list[ast.Expr] = []
        if not ts.check("op", "}"):
            items.append(parse_expr(ts))
            while ts.accept("op", ","):
                items.append(parse_expr(ts))
        ts.expect("op", "}", what="'}'")
        return ast.SetLit(tuple(items), span=_tok_span(ts, tok))
    found = repr(tok.text) if tok.text.strip() else tok.kind
    raise ParseError("E-PARSE-001", f"expected expression, found {found}", tok.span(ts.file))


# ---------------------------------------------------------------------------
# Types


def parse_type(ts: TokenStream) -> ast.TypeExpr:
    tok = ts.peek()
    if ts.at_word("bool"):
        ts.advance()
        return ast.TBool(span=_tok_span(ts, tok))
    if ts.at_word("int"):
        ts.advance()
        return ast.TInt(span=_tok_span(ts, tok))
    if ts.at_word("set"):
        ts.advance()
        ts.expect_word("of")
        return ast.TSetOf(parse_type(ts), span=_tok_span(ts, tok))
    if ts.at_word("partial", "total", "map"):
        total = False
        if ts.at_word("partial"):
            ts.advance()
        elif ts.at_word("total"):
            ts.advance()
            total = True
        ts.expect_word("map")
        dom = parse_type(ts)
        ts.expect("op", "->", what="'->' in map type")
        ran = parse_type(ts)
        return ast.TMap(dom, ran, total, span=_tok_span(ts, tok))
    # Either a named type or an integer range `lo..hi`.
    lo = _parse_additive(ts)
    if ts.check("op", ".."):
        ts.advance()
        hi = _parse_additive(ts)
        return ast.TRange(lo, hi, span=_tok_span(ts, tok))
    if isinstance(lo, ast.Name):
        return ast.TName(lo.name, span=_tok_span(ts, tok))
    raise ParseError("E-PARSE-001", "expected a type", tok.span(ts.file))


# ---------------------------------------------------------------------------
# Contexts


def parse_context(text: str, file: str = "<string>") -> ast.ContextSpec:
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    head = ts.expect_word("context")
    name = ts.expect("name", what="context name").text
    ts.expect_newline()
    sets: list[ast.CarrierSet] = []
    constants: list[ast.ConstantDef] = []
    while True:
        ts.skip_newlines()
        if ts.at_word("end"):
            ts.advance()
            break
        if ts.at_word("set"):
            tok = ts.advance()
            sname = ts.expect("name", what="carrier set name").text
            ts.expect("op", "=")
            ts.expect("op", "{")
            elems: list[str] = []
            if not ts.check("op", "}"):
                elems.append(ts.expect("name", what="element name").text)
                while ts.accept("op", ","):
                    elems.append(ts.expect("name", what="element name").text)
            ts.expect("op", "}")
            if len(set(elems)) != len(elems):
                raise ParseError("E-PARSE-003", f"duplicate element in carrier set {sname}", _tok_span(ts, tok))
            sets.append(ast.CarrierSet(sname, tuple(elems), span=_tok_span(ts, tok)))
            ts.expect_newline()
        elif ts.at_word("constant"):
            tok = ts.advance()
            cname = ts.expect("name", what="constant name").text
            ts.expect("op", "=")
            value = parse_expr(ts)
            constants.append(ast.ConstantDef(cname, value, span=_tok_span(ts, tok)))
            ts.expect_newline()
        else:
            raise ParseError(
                "E-PARSE-001",
                f"expected 'set', 'constant', or 'end', found {ts.peek().text!r}",
                ts.span(),
            )
    declared = [s.name for s in sets] + [c.name for c in constants]
    if len(set(declared)) != len(declared):
        raise ParseError("E-PARSE-003", f"duplicate declaration in context {name}", head.span(file))
    return ast.ContextSpec(name, tuple(sets), tuple(constants), span=head.span(file))


# ---------------------------------------------------------------------------
# Machines


_SECTION_WORDS = ("refines", "sees", "implements", "glue", "variables", "invariants", "events", "end")


def _parse_name_list(ts: TokenStream) -> tuple[str, ...]:
    names = [ts.expect("name", what="name").text]
    while ts.accept("op", ","):
        names.append(ts.expect("name", what="name").text)
    return tuple(names)


def _parse_event(ts: TokenStream) -> ast.EventSpec:
    head = ts.expect_word("event")
    name = ts.expect("name", what="event name").text
    ts.expect_newline()
    params: list[ast.ParamDecl] = []
    guards: list[ast.Expr] = []
    actions: list[ast.Assignment] = []
    seen_then = False
    while True:
        ts.skip_newlines()
        if ts.at_word("end"):
            ts.advance()
            break
        if ts.at_word("any") and not seen_then:
            tok = ts.advance()
            while True:
                pname = ts.expect("name", what="parameter name").text
                ts.expect("op", ":", what="':' after parameter name")
                ptype = parse_type(ts)
                params.append(ast.ParamDecl(pname, ptype, span=_tok_span(ts, tok)))
                if not ts.accept("op", ","):
                    break
            ts.expect_newline()
        elif ts.at_word("when") and not seen_then:
            ts.advance()
            guards.append(parse_expr(ts))
            ts.expect_newline()
        elif ts.at_word("then") and not seen_then:
            ts.advance()
            ts.expect_newline()
            seen_then = True
        elif seen_then:
            tok = ts.expect("name", what="variable to assign")
            ts.expect("op", ":=", what="':='")
            expr = parse_expr(ts)
            actions.append(ast.Assignment(tok.text, expr, span=_tok_span(ts, tok)))
            ts.expect_newline()
        else:
            raise ParseError(
                "E-PARSE-001",
                f"expected 'any', 'when', 'then', or 'end' in event {name}, found {ts.peek().text!r}",
                ts.span(),
            )
    return ast.EventSpec(name, tuple(params), tuple(guards), tuple(actions), span=head.span(ts.file))


def parse_machine(text: str, file: str = "<string>") -> ast.MachineSpec:
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    head = ts.expect_word("machine")
    name = ts.expect("name", what="machine name").text
    ts.expect_newline()

    refines: str | None = None
    sees: tuple[str, ...] = ()
    implements: tuple[str, ...] = ()
    glue: list[ast.GlueDef] = []
    variables: list[ast.VarDecl] = []
    invariants: list[ast.InvariantDef] = []
    events: list[ast.EventSpec] = []

    while True:
        ts.skip_newlines()
        if ts.at_word("end") or ts.at_end():
            ts.accept_word("end")
            break
        if ts.at_word("refines"):
            ts.advance()
            refines = ts.expect("name", what="refined machine name").text
            ts.expect_newline()
        elif ts.at_word("sees"):
            ts.advance()
            sees = _parse_name_list(ts)
            ts.expect_newline()
        elif ts.at_word("implements"):
            ts.advance()
            implements = _parse_name_list(ts)
            ts.expect_newline()
        elif ts.at_word("glue"):
            tok = ts.advance()
            var = ts.expect("name", what="abstract variable name").text
            ts.expect("op", "=")
            glue.append(ast.GlueDef(var, parse_expr(ts), span=_tok_span(ts, tok)))
            ts.expect_newline()
        elif ts.at_word("variables"):
            ts.advance()
            ts.expect_newline()
            while not ts.at_word(*_SECTION_WORDS):
                ts.skip_newlines()
                if ts.at_word(*_SECTION_WORDS):
                    break
                tok = ts.expect("name", what="variable name")
                ts.expect("op", ":", what="':' after variable name")
                vtype = parse_type(ts)
                variables.append(ast.VarDecl(tok.text, vtype, span=_tok_span(ts, tok)))
                ts.expect_newline()
        elif ts.at_word("invariants"):
            ts.advance()
            ts.expect_newline()
            while not ts.at_word(*_SECTION_WORDS):
                ts.skip_newlines()
                if ts.at_word(*_SECTION_WORDS):
                    break
                tok = ts.expect("name", what="invariant label")
                ts.expect("op", ":", what="':' after invariant label")
                invariants.append(ast.InvariantDef(tok.text, parse_expr(ts), span=_tok_span(ts, tok)))
                ts.expect_newline()
        elif ts.at_word("events"):
            ts.advance()
            ts.expect_newline()
            while True:
                ts.skip_newlines()
                if ts.at_word("end"):
                    ts.advance()
                    break
                events.append(_parse_event(ts))
        else:
            raise ParseError(
                "E-PARSE-001",
                f"unexpected {ts.peek().text!r} in machine {name}",
                ts.span(),
            )

    for decls, kind in ((variables, "variable"), (invariants, "invariant label"), (events, "event")):
        names = [getattr(d, "name", None) or getattr(d, "label", None) for d in decls]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ParseError("E-PARSE-003", f"duplicate {kind} {dup!r} in machine {name}", head.span(file))

    return ast.MachineSpec(
        name,
        refines,
        sees,
        implements,
        tuple(glue),
        tuple(variables),
        tuple(invariants),
        tuple(events),
        span=head.span(file),
    )


def parse_expression(text: str, file: str = "<string>") -> ast.Expr:
    """Parse a standalone expression (used by tests and the obligation language)."""
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    expr = parse_expr(ts)
    ts.skip_newlines()
    if not ts.at_end():
        raise ParseError("E-PARSE-001", f"unexpected trailing {ts.peek().text!r}", ts.span())
    return expr
