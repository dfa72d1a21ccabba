"""Expression evaluation over finite domains.

Values are immutable Python objects: int, bool, str (carrier-set elements),
frozenset, FMap, and 2-tuples for maplets.  `&`, `or`, and `=>` short-circuit
left to right.  Division or modulo by zero raises E-EVAL-001; callers decide
whether that disables a guard binding or aborts an action.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from vdd.errors import EvalError, NO_SPAN
from vdd.specml import ast
from vdd.specml.values import (
    BoolType,
    EnumType,
    FMap,
    IntRangeType,
    IntType,
    MapType,
    PairType,
    SetType,
    Type,
    Value,
    canonical_key,
    cardinality,
    enumerate_type,
    fmt_value,
    sort_values,
)

_RANGE_LIMIT = 1_000_000


@dataclass
class Env:
    """Name bindings plus the enum registry; `pre` carries a pre-state for $0."""

    values: dict[str, Value]
    enums: dict[str, EnumType]
    pre: dict[str, Value] | None = None

    def child(self, bindings: dict[str, Value]) -> "Env":
        merged = dict(self.values)
        merged.update(bindings)
        return Env(merged, self.enums, self.pre)

    def with_pre(self, pre: dict[str, Value] | None) -> "Env":
        return Env(self.values, self.enums, pre)


def build_env(contexts: Sequence[ast.ContextSpec]) -> Env:
    """Evaluate carrier sets and constants, in declaration order, into an Env."""
    values: dict[str, Value] = {}
    enums: dict[str, EnumType] = {}
    for ctx in contexts:
        for s in ctx.sets:
            if s.name in values:
                raise EvalError("E-EVAL-006", f"name {s.name!r} already defined", s.span)
            enums[s.name] = EnumType(s.name, tuple(s.elements))
            values[s.name] = frozenset(s.elements)
            for elem in s.elements:
                if elem in values:
                    raise EvalError("E-EVAL-006", f"name {elem!r} already defined", s.span)
                values[elem] = elem
        for c in ctx.constants:
            if c.name in values:
                raise EvalError("E-EVAL-006", f"name {c.name!r} already defined", c.span)
            values[c.name] = eval_expr(c.value, Env(values, enums))
    return Env(values, enums)


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(e: ast.Expr, env: Env) -> Value:
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.Name):
        try:
            return env.values[e.name]
        except KeyError:
            raise EvalError("E-EVAL-003", f"unknown name {e.name!r}", e.span) from None
    if isinstance(e, ast.PreName):
        if env.pre is None:
            raise EvalError("E-EVAL-004", f"{e.name}$0 used where no pre-state exists", e.span)
        try:
            return env.pre[e.name]
        except KeyError:
            raise EvalError("E-EVAL-003", f"unknown pre-state name {e.name!r}", e.span) from None
    if isinstance(e, ast.SetLit):
        if e.items and all(isinstance(i, ast.Maplet) for i in e.items):
            pairs = {}
            for item in e.items:
                k = eval_expr(item.left, env)
                v = eval_expr(item.right, env)
                if k in pairs and pairs[k] != v:
                    raise EvalError("E-EVAL-005", f"map literal not a function at {fmt_value(k)}", e.span)
                pairs[k] = v
            return FMap(pairs.items())
        return frozenset(eval_expr(i, env) for i in e.items)
    if isinstance(e, ast.Maplet):
        return (eval_expr(e.left, env), eval_expr(e.right, env))
    if isinstance(e, ast.Unary):
        if e.op == "not":
            return not _as_bool(eval_expr(e.operand, env), e)
        return -_as_int(eval_expr(e.operand, env), e)
    if isinstance(e, ast.Binary):
        return _binary(e, env)
    if isinstance(e, ast.Quantifier):
        return _quantifier(e, 0, env)
    if isinstance(e, ast.Call):
        return _call(e, env)
    raise EvalError("E-EVAL-006", f"cannot evaluate {type(e).__name__}", getattr(e, "span", NO_SPAN))


def _binary(e: ast.Binary, env: Env) -> Value:
    op = e.op
    if op == "&":
        return _as_bool(eval_expr(e.left, env), e) and _as_bool(eval_expr(e.right, env), e)
    if op == "or":
        return _as_bool(eval_expr(e.left, env), e) or _as_bool(eval_expr(e.right, env), e)
    if op == "=>":
        return (not _as_bool(eval_expr(e.left, env), e)) or _as_bool(eval_expr(e.right, env), e)

    left = eval_expr(e.left, env)
    right = eval_expr(e.right, env)
    if op == "=":
        return values_equal(left, right)
    if op == "/=":
        return not values_equal(left, right)
    if op in ("<", "<=", ">", ">="):
        a, b = _as_int(left, e), _as_int(right, e)
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
    if op == ":":
        return _member(left, right, e)
    if op == "/:":
        return not _member(left, right, e)
    if op == "<:":
        return _as_setlike(left, e) <= _as_setlike(right, e)
    if op == "..":
        lo, hi = _as_int(left, e), _as_int(right, e)
        if hi - lo > _RANGE_LIMIT:
            raise EvalError("E-EVAL-006", f"range {lo}..{hi} too large to enumerate", e.span)
        return frozenset(range(lo, hi + 1))
    if op in ("\\/", "/\\", "\\"):
        ls, rs = _as_setlike(left, e), _as_setlike(right, e)
        res = {"\\/": ls | rs, "/\\": ls & rs, "\\": ls - rs}[op]
        if isinstance(left, FMap) or isinstance(right, FMap):
            return _as_fmap_from_pairs(res, e)
        return res
    if op == "<+":
        return _as_fmap(left, e).override(_as_fmap(right, e))
    if op in ("+", "-", "*", "/", "mod"):
        a, b = _as_int(left, e), _as_int(right, e)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            raise EvalError("E-EVAL-001", "division by zero" if op == "/" else "modulo by zero", e.span)
        return a // b if op == "/" else a % b
    raise EvalError("E-EVAL-006", f"unknown operator {op!r}", e.span)


def _quantifier(e: ast.Quantifier, i: int, env: Env) -> bool:
    if i == len(e.vars):
        return _as_bool(eval_expr(e.body, env), e)
    name, vtype = e.vars[i]
    for v in _quantifier_range(e, name, vtype, env):
        holds = _quantifier(e, i + 1, env.child({name: v}))
        if e.kind == "forall" and not holds:
            return False
        if e.kind == "exists" and holds:
            return True
    return e.kind == "forall"


def _quantifier_range(e: ast.Quantifier, name: str, vtype: ast.TypeExpr | None, env: Env) -> list[Value]:
    if vtype is not None:
        t = resolve_type(vtype, env)
        if cardinality(t) is None:
            raise EvalError("E-EVAL-006", f"cannot enumerate type {t} of {name!r}", e.span)
        return list(enumerate_type(t))
    bound = _find_bound(e.body, name)
    if bound is None:
        raise EvalError(
            "E-EVAL-006",
            f"cannot determine the range of {name!r}; declare a type or add a membership bound",
            e.span,
        )
    vals = eval_expr(bound, env)
    if isinstance(vals, FMap):
        return sort_values(vals.items())
    if isinstance(vals, frozenset):
        return sort_values(vals)
    raise EvalError("E-EVAL-006", f"membership bound of {name!r} is not a set", e.span)


def _find_bound(e: ast.Expr, name: str) -> ast.Expr | None:
    """First `name : S` occurrence, scanning depth-first; respects shadowing."""
    if isinstance(e, ast.Binary):
        if e.op == ":" and isinstance(e.left, ast.Name) and e.left.name == name:
            return e.right
        return _find_bound(e.left, name) or _find_bound(e.right, name)
    if isinstance(e, ast.Unary):
        return _find_bound(e.operand, name)
    if isinstance(e, ast.Quantifier):
        if any(v == name for v, _ in e.vars):
            return None
        return _find_bound(e.body, name)
    if isinstance(e, ast.Maplet):
        return _find_bound(e.left, name) or _find_bound(e.right, name)
    if isinstance(e, ast.Call):
        for a in e.args:
            found = _find_bound(a, name)
            if found is not None:
                return found
        return None
    if isinstance(e, ast.SetLit):
        for item in e.items:
            found = _find_bound(item, name)
            if found is not None:
                return found
        return None
    return None


# The static checker reuses the same bound-inference rule so that whatever it
# accepts, evaluation can actually enumerate.
find_membership_bound = _find_bound


def _call(e: ast.Call, env: Env) -> Value:
    if e.func in ("card", "dom", "ran", "DIST"):
        if len(e.args) != 1:
            raise EvalError("E-EVAL-006", f"{e.func} takes exactly one argument", e.span)
        v = eval_expr(e.args[0], env)
        if e.func == "card":
            if isinstance(v, (frozenset, FMap)):
                return len(v)
            raise EvalError("E-EVAL-006", "card expects a set or a map", e.span)
        if e.func == "dom":
            return _as_fmap(v, e).dom()
        if e.func == "ran":
            return _as_fmap(v, e).ran()
        if isinstance(v, tuple) and len(v) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            return abs(v[0] - v[1])
        raise EvalError("E-EVAL-006", "DIST expects a maplet of two integers", e.span)
    try:
        f = env.values[e.func]
    except KeyError:
        raise EvalError("E-EVAL-003", f"unknown name {e.func!r}", e.span) from None
    fmap = _as_fmap(f, e)
    if len(e.args) != 1:
        raise EvalError("E-EVAL-006", f"{e.func} application takes exactly one argument", e.span)
    key = eval_expr(e.args[0], env)
    if key not in fmap:
        raise EvalError("E-EVAL-002", f"{e.func} applied outside its domain at {fmt_value(key)}", e.span)
    return fmap.apply(key)


# ---------------------------------------------------------------------------
# Value helpers


def values_equal(a: Value, b: Value) -> bool:
    return _norm_empty(a) == _norm_empty(b)


def _norm_empty(v: Value) -> Value:
    if isinstance(v, FMap) and len(v) == 0:
        return frozenset()
    return v


def _member(item: Value, container: Value, e: ast.Expr) -> bool:
    if isinstance(container, FMap):
        return isinstance(item, tuple) and len(item) == 2 and item in container.items()
    if isinstance(container, frozenset):
        return item in container
    raise EvalError("E-EVAL-006", "membership requires a set or a map", getattr(e, "span", NO_SPAN))


def _as_bool(v: Value, e: ast.Expr) -> bool:
    if isinstance(v, bool):
        return v
    raise EvalError("E-EVAL-006", f"expected a boolean, got {fmt_value(v)}", getattr(e, "span", NO_SPAN))


def _as_int(v: Value, e: ast.Expr) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    raise EvalError("E-EVAL-006", f"expected an integer, got {fmt_value(v)}", getattr(e, "span", NO_SPAN))


def _as_setlike(v: Value, e: ast.Expr) -> frozenset:
    if isinstance(v, frozenset):
        return v
    if isinstance(v, FMap):
        return frozenset(v.items())
    raise EvalError("E-EVAL-006", f"expected a set, got {fmt_value(v)}", getattr(e, "span", NO_SPAN))


def _as_fmap(v: Value, e: ast.Expr) -> FMap:
    if isinstance(v, FMap):
        return v
    if isinstance(v, frozenset) and not v:
        return FMap()
    raise EvalError("E-EVAL-006", f"expected a map, got {fmt_value(v)}", getattr(e, "span", NO_SPAN))


def _as_fmap_from_pairs(pairs: frozenset, e: ast.Expr) -> FMap:
    m: dict[Value, Value] = {}
    for p in pairs:
        if not (isinstance(p, tuple) and len(p) == 2):
            raise EvalError("E-EVAL-006", "set operation mixed maplets with plain elements", getattr(e, "span", NO_SPAN))
        k, v = p
        if k in m and m[k] != v:
            raise EvalError("E-EVAL-005", f"result not a function at {fmt_value(k)}", getattr(e, "span", NO_SPAN))
        m[k] = v
    return FMap(m.items())


# ---------------------------------------------------------------------------
# Types at runtime


def resolve_type(t: ast.TypeExpr, env: Env) -> Type:
    if isinstance(t, ast.TBool):
        return BoolType()
    if isinstance(t, ast.TInt):
        return IntType()
    if isinstance(t, ast.TRange):
        lo = _as_int(eval_expr(t.lo, env), t.lo)
        hi = _as_int(eval_expr(t.hi, env), t.hi)
        return IntRangeType(lo, hi)
    if isinstance(t, ast.TName):
        enum = env.enums.get(t.name)
        if enum is None:
            raise EvalError("E-EVAL-003", f"unknown type {t.name!r}", t.span)
        return enum
    if isinstance(t, ast.TSetOf):
        return SetType(resolve_type(t.elem, env))
    if isinstance(t, ast.TMap):
        return MapType(resolve_type(t.dom, env), resolve_type(t.ran, env), t.total)
    raise EvalError("E-EVAL-006", f"cannot resolve type {type(t).__name__}", getattr(t, "span", NO_SPAN))


def conform(v: Value, t: Type, e: ast.Expr) -> Value:
    """Check that a value inhabits a type; canonicalizes empty maps/sets."""
    span = getattr(e, "span", NO_SPAN)
    err = EvalError("E-EVAL-006", f"value {fmt_value(v)} is not in type {t}", span)
    if isinstance(t, BoolType):
        if isinstance(v, bool):
            return v
    elif isinstance(t, IntType):
        if isinstance(v, int) and not isinstance(v, bool):
            return v
    elif isinstance(t, IntRangeType):
        if isinstance(v, int) and not isinstance(v, bool) and t.lo <= v <= t.hi:
            return v
    elif isinstance(t, EnumType):
        if isinstance(v, str) and v in t.elements:
            return v
    elif isinstance(t, SetType):
        v = _norm_empty(v)
        if isinstance(v, frozenset):
            return frozenset(conform(m, t.elem, e) for m in v)
    elif isinstance(t, MapType):
        if isinstance(v, frozenset) and not v:
            v = FMap()
        if isinstance(v, FMap):
            card_dom = cardinality(t.dom)
            if t.total and card_dom is not None and len(v) != card_dom:
                raise EvalError("E-EVAL-006", f"total map {fmt_value(v)} does not cover {t.dom}", span)
            return FMap((conform(k, t.dom, e), conform(w, t.ran, e)) for k, w in v.items())
    elif isinstance(t, PairType):
        if isinstance(v, tuple) and len(v) == 2:
            return (conform(v[0], t.left, e), conform(v[1], t.right, e))
    raise err
