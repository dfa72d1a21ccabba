"""Static well-formedness checks for machines and contexts.

Catches what exploration would trip over at runtime: unknown names, operand
mismatches, non-finite variable and parameter types (E-TYPE-003), events that
assign the same variable twice (E-TYPE-007), and an INITIALISATION that is
missing or does not assign every variable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from vdd.errors import EvalError, TypeCheckError
from vdd.specml import ast
from vdd.specml.eval import Env, build_env, find_membership_bound, resolve_type
from vdd.specml.values import (
    BoolType,
    EmptyType,
    EnumType,
    FMap,
    IntRangeType,
    IntType,
    MapType,
    PairType,
    SetType,
    Type,
    cardinality,
    types_compatible,
)

Scope = dict[str, Type]


@dataclass
class TypeEnv:
    """Resolved typing information for one machine and the contexts it sees."""

    env: Env
    enums: dict[str, EnumType]
    variable_types: dict[str, Type]
    base_scope: Scope

    def scope(self, extra: Scope | None = None) -> Scope:
        if not extra:
            return dict(self.base_scope)
        merged = dict(self.base_scope)
        merged.update(extra)
        return merged


def _is_int(t: Type) -> bool:
    return isinstance(t, (IntType, IntRangeType))


def _is_bool(t: Type) -> bool:
    return isinstance(t, BoolType)


def _is_setlike(t: Type) -> bool:
    return isinstance(t, (SetType, MapType, EmptyType))


def _value_type(v, element_types: dict[str, EnumType]) -> Type:
    if isinstance(v, bool):
        return BoolType()
    if isinstance(v, int):
        return IntType()
    if isinstance(v, str):
        enum = element_types.get(v)
        if enum is None:
            raise TypeCheckError("E-TYPE-001", f"value {v!r} belongs to no carrier set")
        return enum
    if isinstance(v, frozenset):
        if not v:
            return EmptyType()
        return SetType(_value_type(next(iter(v)), element_types))
    if isinstance(v, FMap):
        if len(v) == 0:
            return EmptyType()
        k, w = v.items()[0]
        return MapType(_value_type(k, element_types), _value_type(w, element_types))
    if isinstance(v, tuple) and len(v) == 2:
        return PairType(_value_type(v[0], element_types), _value_type(v[1], element_types))
    raise TypeCheckError("E-TYPE-002", f"cannot type value {v!r}")


def _resolve(t: ast.TypeExpr, env: Env) -> Type:
    try:
        return resolve_type(t, env)
    except EvalError as exc:
        code = "E-TYPE-001" if exc.code == "E-EVAL-003" else "E-TYPE-002"
        raise TypeCheckError(code, exc.message, exc.span) from None


def _require_finite(t: Type, what: str, span) -> None:
    if cardinality(t) is None:
        raise TypeCheckError("E-TYPE-003", f"type {t} of {what} is not finite", span)


def infer_type(e: ast.Expr, scope: Scope, env: Env, allow_pre: bool = False) -> Type:
    """Static type of an expression; raises on mismatches and unknown names."""
    if isinstance(e, ast.IntLit):
        return IntType()
    if isinstance(e, ast.BoolLit):
        return BoolType()
    if isinstance(e, ast.Name):
        t = scope.get(e.name)
        if t is None:
            raise TypeCheckError("E-TYPE-001", f"unknown name {e.name!r}", e.span)
        return t
    if isinstance(e, ast.PreName):
        if not allow_pre:
            raise TypeCheckError("E-TYPE-005", f"{e.name}$0 is only meaningful under a before-after atom", e.span)
        t = scope.get(e.name)
        if t is None:
            raise TypeCheckError("E-TYPE-001", f"unknown name {e.name!r}", e.span)
        return t
    if isinstance(e, ast.SetLit):
        if not e.items:
            return EmptyType()
        if all(isinstance(i, ast.Maplet) for i in e.items):
            first = e.items[0]
            kt = infer_type(first.left, scope, env, allow_pre)
            wt = infer_type(first.right, scope, env, allow_pre)
            for item in e.items[1:]:
                if not types_compatible(kt, infer_type(item.left, scope, env, allow_pre)) or not types_compatible(
                    wt, infer_type(item.right, scope, env, allow_pre)
                ):
                    raise TypeCheckError("E-TYPE-002", "map literal mixes incompatible maplets", item.span)
            return MapType(kt, wt)
        t0 = infer_type(e.items[0], scope, env, allow_pre)
        for item in e.items[1:]:
            if not types_compatible(t0, infer_type(item, scope, env, allow_pre)):
                raise TypeCheckError("E-TYPE-002", "set literal mixes incompatible elements", item.span)
        return SetType(t0)
    if isinstance(e, ast.Maplet):
        return PairType(
            infer_type(e.left, scope, env, allow_pre),
            infer_type(e.right, scope, env, allow_pre),
        )
    if isinstance(e, ast.Unary):
        t = infer_type(e.operand, scope, env, allow_pre)
        if e.op == "not":
            if not _is_bool(t):
                raise TypeCheckError("E-TYPE-002", "not expects a boolean", e.span)
            return BoolType()
        if not _is_int(t):
            raise TypeCheckError("E-TYPE-002", "unary - expects an integer", e.span)
        return IntType()
    if isinstance(e, ast.Binary):
        return _infer_binary(e, scope, env, allow_pre)
    if isinstance(e, ast.Quantifier):
        inner = dict(scope)
        for name, vtype in e.vars:
            inner[name] = _quantified_type(e, name, vtype, inner, env, allow_pre)
        if not _is_bool(infer_type(e.body, inner, env, allow_pre)):
            raise TypeCheckError("E-TYPE-002", f"{e.kind} body must be a boolean", e.span)
        return BoolType()
    if isinstance(e, ast.Call):
        return _infer_call(e, scope, env, allow_pre)
    raise TypeCheckError("E-TYPE-002", f"cannot type {type(e).__name__}", getattr(e, "span", None) or e.span)


def _quantified_type(
    e: ast.Quantifier, name: str, vtype: ast.TypeExpr | None, scope: Scope, env: Env, allow_pre: bool
) -> Type:
    if vtype is not None:
        t = _resolve(vtype, env)
        _require_finite(t, f"quantified variable {name!r}", e.span)
        return t
    bound = find_membership_bound(e.body, name)
    if bound is None:
        raise TypeCheckError(
            "E-TYPE-002",
            f"cannot determine the type of {name!r}; declare a type or add a membership bound",
            e.span,
        )
    bt = infer_type(bound, scope, env, allow_pre)
    if isinstance(bt, SetType):
        return bt.elem
    if isinstance(bt, MapType):
        return PairType(bt.dom, bt.ran)
    raise TypeCheckError("E-TYPE-002", f"membership bound of {name!r} is not a set", e.span)


def _infer_binary(e: ast.Binary, scope: Scope, env: Env, allow_pre: bool) -> Type:
    op = e.op
    lt = infer_type(e.left, scope, env, allow_pre)
    rt = infer_type(e.right, scope, env, allow_pre)
    if op in ("&", "or", "=>"):
        if not (_is_bool(lt) and _is_bool(rt)):
            raise TypeCheckError("E-TYPE-002", f"{op} expects booleans", e.span)
        return BoolType()
    if op in ("=", "/="):
        if not types_compatible(lt, rt):
            raise TypeCheckError("E-TYPE-002", f"cannot compare {lt} with {rt}", e.span)
        return BoolType()
    if op in ("<", "<=", ">", ">="):
        if not (_is_int(lt) and _is_int(rt)):
            raise TypeCheckError("E-TYPE-002", f"{op} expects integers", e.span)
        return BoolType()
    if op in (":", "/:"):
        if isinstance(rt, SetType):
            if not types_compatible(lt, rt.elem):
                raise TypeCheckError("E-TYPE-002", f"{lt} cannot be a member of {rt}", e.span)
        elif isinstance(rt, MapType):
            want = PairType(rt.dom, rt.ran)
            if not types_compatible(lt, want):
                raise TypeCheckError("E-TYPE-002", f"{lt} cannot be a member of {rt}", e.span)
        elif not isinstance(rt, EmptyType):
            raise TypeCheckError("E-TYPE-002", "membership requires a set or a map", e.span)
        return BoolType()
    if op == "<:":
        if not (_is_setlike(lt) and _is_setlike(rt) and types_compatible(lt, rt)):
            raise TypeCheckError("E-TYPE-002", f"cannot compare {lt} <: {rt}", e.span)
        return BoolType()
    if op == "..":
        if not (_is_int(lt) and _is_int(rt)):
            raise TypeCheckError("E-TYPE-002", ".. expects integer bounds", e.span)
        return SetType(IntType())
    if op in ("\\/", "/\\", "\\"):
        if not (_is_setlike(lt) and _is_setlike(rt) and types_compatible(lt, rt)):
            raise TypeCheckError("E-TYPE-002", f"cannot apply {op} to {lt} and {rt}", e.span)
        if isinstance(lt, EmptyType):
            return rt
        return lt
    if op == "<+":
        if not (isinstance(lt, (MapType, EmptyType)) and isinstance(rt, (MapType, EmptyType))):
            raise TypeCheckError("E-TYPE-002", "<+ expects maps", e.span)
        if not types_compatible(lt, rt):
            raise TypeCheckError("E-TYPE-002", f"cannot override {lt} with {rt}", e.span)
        return rt if isinstance(lt, EmptyType) else lt
    if op in ("+", "-", "*", "/", "mod"):
        if not (_is_int(lt) and _is_int(rt)):
            raise TypeCheckError("E-TYPE-002", f"{op} expects integers", e.span)
        return IntType()
    raise TypeCheckError("E-TYPE-002", f"unknown operator {op!r}", e.span)


def _infer_call(e: ast.Call, scope: Scope, env: Env, allow_pre: bool) -> Type:
    if e.func in ("card", "dom", "ran", "DIST"):
        if len(e.args) != 1:
            raise TypeCheckError("E-TYPE-002", f"{e.func} takes exactly one argument", e.span)
        at = infer_type(e.args[0], scope, env, allow_pre)
        if e.func == "card":
            if not _is_setlike(at):
                raise TypeCheckError("E-TYPE-002", "card expects a set or a map", e.span)
            return IntType()
        if e.func in ("dom", "ran"):
            if isinstance(at, EmptyType):
                return EmptyType()
            if not isinstance(at, MapType):
                raise TypeCheckError("E-TYPE-002", f"{e.func} expects a map", e.span)
            return SetType(at.dom if e.func == "dom" else at.ran)
        if not (isinstance(at, PairType) and _is_int(at.left) and _is_int(at.right)):
            raise TypeCheckError("E-TYPE-002", "DIST expects a maplet of two integers", e.span)
        return IntType()
    ft = scope.get(e.func)
    if ft is None:
        raise TypeCheckError("E-TYPE-001", f"unknown name {e.func!r}", e.span)
    if not isinstance(ft, MapType):
        raise TypeCheckError("E-TYPE-002", f"{e.func} is not a map and cannot be applied", e.span)
    if len(e.args) != 1:
        raise TypeCheckError("E-TYPE-002", "map application takes exactly one argument", e.span)
    at = infer_type(e.args[0], scope, env, allow_pre)
    if not types_compatible(at, ft.dom):
        raise TypeCheckError("E-TYPE-002", f"{e.func} expects {ft.dom}, got {at}", e.span)
    return ft.ran


def typecheck_contexts(contexts: Sequence[ast.ContextSpec]) -> Env:
    try:
        return build_env(contexts)
    except EvalError as exc:
        code = "E-TYPE-001" if exc.code == "E-EVAL-003" else "E-TYPE-002"
        raise TypeCheckError(code, exc.message, exc.span) from None


def typecheck(
    machine: ast.MachineSpec,
    contexts: Sequence[ast.ContextSpec] = (),
    abstract: ast.MachineSpec | None = None,
) -> TypeEnv:
    env = typecheck_contexts(contexts)
    element_types: dict[str, EnumType] = {}
    for enum in env.enums.values():
        for elem in enum.elements:
            element_types[elem] = enum

    base: Scope = {}
    for name, enum in env.enums.items():
        base[name] = SetType(enum)
    for name, value in env.values.items():
        if name not in base and name not in element_types:
            base[name] = _value_type(value, element_types)
    base.update(element_types)

    variable_types: dict[str, Type] = {}
    for v in machine.variables:
        if v.name in base:
            raise TypeCheckError("E-TYPE-001", f"variable {v.name!r} conflicts with a context name", v.span)
        t = _resolve(v.type, env)
        _require_finite(t, f"variable {v.name!r}", v.span)
        variable_types[v.name] = t
    base.update(variable_types)

    for inv in machine.invariants:
        if not _is_bool(infer_type(inv.pred, base, env)):
            raise TypeCheckError("E-TYPE-002", f"invariant {inv.label} must be a boolean", inv.span)

    if machine.glue and not machine.refines:
        raise TypeCheckError("E-TYPE-008", f"machine {machine.name} has glue but refines nothing", machine.span)
    for g in machine.glue:
        gt = infer_type(g.expr, base, env)
        if abstract is not None:
            avar = next((v for v in abstract.variables if v.name == g.var), None)
            if avar is None:
                raise TypeCheckError(
                    "E-TYPE-008", f"glue maps {g.var!r}, which {abstract.name} does not declare", g.span
                )
            at = _resolve(avar.type, env)
            if not types_compatible(gt, at):
                raise TypeCheckError("E-TYPE-002", f"glue for {g.var!r} has type {gt}, expected {at}", g.span)

    init = machine.event(ast.INIT_EVENT)
    if init is None:
        raise TypeCheckError("E-TYPE-006", f"machine {machine.name} has no INITIALISATION", machine.span)

    for event in machine.events:
        is_init = event.name == ast.INIT_EVENT
        # INITIALISATION builds states from nothing, so its expressions may
        # not read machine variables.
        ev_scope: Scope = {k: t for k, t in base.items() if not (is_init and k in variable_types)}
        for p in event.params:
            if p.name in base:
                raise TypeCheckError(
                    "E-TYPE-001", f"parameter {p.name!r} of {event.name} conflicts with another name", p.span
                )
            pt = _resolve(p.type, env)
            _require_finite(pt, f"parameter {p.name!r} of {event.name}", p.span)
            ev_scope[p.name] = pt
        for guard in event.guards:
            if not _is_bool(infer_type(guard, ev_scope, env)):
                raise TypeCheckError("E-TYPE-002", f"guard of {event.name} must be a boolean", event.span)
        assigned: set[str] = set()
        for a in event.actions:
            vt = variable_types.get(a.var)
            if vt is None:
                raise TypeCheckError("E-TYPE-004", f"{event.name} assigns unknown variable {a.var!r}", a.span)
            if a.var in assigned:
                raise TypeCheckError("E-TYPE-007", f"{event.name} assigns {a.var!r} twice", a.span)
            assigned.add(a.var)
            et = infer_type(a.expr, ev_scope, env)
            if not types_compatible(et, vt):
                raise TypeCheckError(
                    "E-TYPE-002", f"{event.name} assigns {a.var!r} a value of type {et}, expected {vt}", a.span
                )
        if is_init:
            for name in variable_types:
                if name not in assigned:
                    raise TypeCheckError(
                        "E-TYPE-006", f"INITIALISATION must assign variable {name!r}", event.span
                    )

    return TypeEnv(env=env, enums=env.enums, variable_types=variable_types, base_scope=base)
