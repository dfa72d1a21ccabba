"""Static binding of obligation symbols to their target machine.

`resolve` checks every predicate, formula atom, and scenario step against the
machine's typing scope and returns the obligation with domain scopes filled
in, plus any diagnostics:

  E-VO-004  a name, event, or scope domain that does not resolve
  E-VO-005  a parameter that resolves but is ill-typed
  E-VO-006  a `$0` pre-state reference outside a BA atom

Tasks without an explicit `@[...]` scope inherit the domains implemented by
the machines declaring the variables they mention; since an obligation can
only name its target machine's variables, that union is the target's
`implements` list (falling back to the frame's machine domain for machines
that implement nothing).
"""
from __future__ import annotations

from typing import Sequence

from vdd.errors import Diagnostic, TypeCheckError
from vdd.frames import FrameSpec
from vdd.specml import ast as mast
from vdd.specml.eval import resolve_type
from vdd.specml.typecheck import TypeEnv, infer_type, typecheck
from vdd.specml.values import BoolType, types_compatible

from . import ast


def resolve(
    expr: ast.VOExpr,
    machine: mast.MachineSpec,
    contexts: Sequence[mast.ContextSpec] = (),
    frame: FrameSpec | None = None,
    tenv: TypeEnv | None = None,
) -> tuple[ast.VOExpr, list[Diagnostic]]:
    """Bind an obligation expression against its target machine."""
    if tenv is None:
        tenv = typecheck(machine, contexts)
    r = _Resolver(machine, tenv, frame)
    resolved = r.expr(expr)
    return resolved, r.diagnostics


def task_scopes(expr: ast.VOExpr) -> frozenset[str]:
    """Union of the domain scopes over all task leaves (after resolution)."""
    out: set[str] = set()
    for task in ast.tasks(expr):
        out.update(task.scope or ())
    return frozenset(out)


class _Resolver:
    def __init__(self, machine: mast.MachineSpec, tenv: TypeEnv, frame: FrameSpec | None):
        self.machine = machine
        self.tenv = tenv
        self.frame = frame
        self.diagnostics: list[Diagnostic] = []
        self.constant_scope = {
            k: t for k, t in tenv.base_scope.items() if k not in tenv.variable_types
        }

    def expr(self, e: ast.VOExpr) -> ast.VOExpr:
        if isinstance(e, ast.AndExpr):
            return ast.AndExpr(self.expr(e.left), self.expr(e.right), span=e.span)
        if isinstance(e, ast.OrExpr):
            return ast.OrExpr(self.expr(e.left), self.expr(e.right), span=e.span)
        if isinstance(e, ast.SeqExpr):
            return ast.SeqExpr(self.expr(e.left), self.expr(e.right), span=e.span)
        return self.task(e)

    def task(self, t: ast.VOExpr) -> ast.VOExpr:
        scope = self.scope_for(t)
        if isinstance(t, ast.LtlTask):
            self.formula(t.formula)
            return ast.LtlTask(t.formula, t.label, scope, span=t.span)
        if isinstance(t, ast.InvTask):
            self.pred(t.pred)
            return ast.InvTask(t.pred, t.label, scope, span=t.span)
        if isinstance(t, ast.ExistsTask):
            self.pred(t.pred)
            return ast.ExistsTask(t.pred, t.label, scope, span=t.span)
        assert isinstance(t, ast.TraceTask)
        for step in t.steps:
            self.step(step)
        if t.final is not None:
            self.pred(t.final)
        return ast.TraceTask(t.steps, t.final, t.label, scope, span=t.span)

    def scope_for(self, t) -> tuple[str, ...]:
        if t.scope is not None:
            if self.frame is not None:
                known = self.frame.domain_names
                for name in t.scope:
                    if name not in known:
                        self.report("E-VO-004", f"scope names unknown domain {name!r}", t.span)
            return t.scope
        if self.machine.implements:
            return self.machine.implements
        if self.frame is not None:
            machines = self.frame.machine_domains
            if machines:
                return (machines[0].name,)
        return ()

    def formula(self, f: ast.Formula) -> None:
        if isinstance(f, ast.StateAtom):
            self.pred(f.pred)
        elif isinstance(f, ast.BaAtom):
            self.pred(f.pred, allow_pre=True)
        elif isinstance(f, ast.Not):
            self.formula(f.arg)
        elif isinstance(f, (ast.Globally, ast.Eventually, ast.Next)):
            self.formula(f.arg)
        elif isinstance(f, (ast.And, ast.Or, ast.Implies, ast.Until)):
            self.formula(f.left)
            self.formula(f.right)

    def pred(self, e: mast.Expr, allow_pre: bool = False) -> None:
        try:
            t = infer_type(e, self.tenv.scope(), self.tenv.env, allow_pre=allow_pre)
        except TypeCheckError as exc:
            self.report(_map_code(exc.code), exc.message, exc.span)
            return
        if not isinstance(t, BoolType):
            self.report("E-VO-005", f"predicate has type {t}, expected a boolean", e.span)

    def step(self, s: ast.TraceStep) -> None:
        event = self.machine.event(s.event)
        if event is None or s.event == mast.INIT_EVENT:
            self.report("E-VO-004", f"machine {self.machine.name} has no event {s.event!r}", s.span)
            return
        if s.args and len(s.args) != len(event.params):
            self.report(
                "E-VO-005",
                f"{s.event} takes {len(event.params)} argument(s), got {len(s.args)}",
                s.span,
            )
            return
        for arg, param in zip(s.args, event.params):
            try:
                at = infer_type(arg, self.constant_scope, self.tenv.env)
            except TypeCheckError as exc:
                self.report(_map_code(exc.code), exc.message, exc.span)
                continue
            pt = resolve_type(param.type, self.tenv.env)
            if not types_compatible(at, pt):
                self.report(
                    "E-VO-005",
                    f"argument for {param.name} of {s.event} has type {at}, expected {pt}",
                    arg.span,
                )

    def report(self, code: str, message: str, span) -> None:
        self.diagnostics.append(Diagnostic(code, message, span))


def _map_code(code: str) -> str:
    if code == "E-TYPE-001":
        return "E-VO-004"
    if code == "E-TYPE-005":
        return "E-VO-006"
    return "E-VO-005"
