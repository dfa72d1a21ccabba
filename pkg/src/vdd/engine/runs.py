"""Infinite-run plumbing shared by the checker and the oracle.

A run is an infinite path over *edges*: the explored transitions plus an
implicit stutter self-loop at every deadlock state, so that every state has
at least one outgoing edge.  A `{p}` atom at position i reads the source
state of edge i; a `BA(p)` atom reads the whole edge, with `v$0` bound to
the source and bare `v` to the target (on a stutter loop the two coincide).
"""
from __future__ import annotations

from vdd.errors import EngineError, EvalError
from vdd.specml import ast as mast
from vdd.specml.eval import eval_expr
from vdd.specml.explore import StateSpace, Transition
from vdd.specml.parser import BUILTINS
from vdd.volang import ast as va

from .results import STUTTER


def build_edges(space: StateSpace) -> tuple[list[Transition], dict[tuple, list[int]]]:
    """All edges of the run graph plus a source-state index, in stable order."""
    edges = list(space.transitions)
    for s in space.states:
        if not space.successors(s):
            edges.append(Transition(s, STUTTER, (), s))
    out: dict[tuple, list[int]] = {}
    for i, e in enumerate(edges):
        out.setdefault(e.src, []).append(i)
    return edges, out


def reachable_from(space: StateSpace, starts) -> frozenset:
    """States reachable from `starts` along transitions (deadlocks included)."""
    seen = set()
    queue = [s for s in starts if s not in seen and not seen.add(s)]
    while queue:
        s = queue.pop(0)
        for t in space.successors(s):
            if t.dst not in seen:
                seen.add(t.dst)
                queue.append(t.dst)
    return frozenset(seen)


class AtomEvaluator:
    """Memoized truth values of formula atoms over edges."""

    def __init__(self, space: StateSpace):
        self.space = space
        self._memo: dict[tuple[int, Transition], bool] = {}

    def value(self, atom: va.Formula, edge: Transition) -> bool:
        key = (id(atom), edge)
        if key in self._memo:
            return self._memo[key]
        if isinstance(atom, va.StateAtom):
            env = self.space.state_env(edge.src)
        else:
            assert isinstance(atom, va.BaAtom)
            env = self.space.state_env(edge.dst).with_pre(
                dict(zip(self.space.variables, edge.src))
            )
        try:
            v = eval_expr(atom.pred, env)
        except EvalError as exc:
            if exc.code == "E-EVAL-003":
                raise EngineError("E-ENG-001", exc.message, exc.span) from None
            raise
        result = bool(v)
        self._memo[key] = result
        return result


def normalize(f: va.Formula) -> va.Formula:
    """Collapse `G(F x)` to `F x`, matching the eventuality reading the
    worked obligations rely on; everything else is rebuilt unchanged."""
    if isinstance(f, va.Globally):
        a = normalize(f.arg)
        if isinstance(a, va.Eventually):
            return a
        return va.Globally(a, span=f.span)
    if isinstance(f, va.Eventually):
        return va.Eventually(normalize(f.arg), span=f.span)
    if isinstance(f, va.Next):
        return va.Next(normalize(f.arg), span=f.span)
    if isinstance(f, va.Not):
        return va.Not(normalize(f.arg), span=f.span)
    if isinstance(f, va.And):
        return va.And(normalize(f.left), normalize(f.right), span=f.span)
    if isinstance(f, va.Or):
        return va.Or(normalize(f.left), normalize(f.right), span=f.span)
    if isinstance(f, va.Implies):
        return va.Implies(normalize(f.left), normalize(f.right), span=f.span)
    if isinstance(f, va.Until):
        return va.Until(normalize(f.left), normalize(f.right), span=f.span)
    return f


def atoms_of(f: va.Formula) -> list[va.Formula]:
    """Atom nodes in first-occurrence order (object identity, not equality)."""
    out: list[va.Formula] = []

    def walk(g: va.Formula) -> None:
        if isinstance(g, (va.StateAtom, va.BaAtom)):
            out.append(g)
        elif isinstance(g, (va.Not, va.Globally, va.Eventually, va.Next)):
            walk(g.arg)
        elif isinstance(g, (va.And, va.Or, va.Implies, va.Until)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def expr_free_names(e: mast.Expr, bound: frozenset = frozenset()) -> set[str]:
    """Free identifiers of a predicate (quantifier-aware)."""
    if isinstance(e, mast.Name):
        return set() if e.name in bound else {e.name}
    if isinstance(e, mast.PreName):
        return set() if e.name in bound else {e.name}
    if isinstance(e, (mast.IntLit, mast.BoolLit)):
        return set()
    if isinstance(e, mast.SetLit):
        out: set[str] = set()
        for item in e.items:
            out |= expr_free_names(item, bound)
        return out
    if isinstance(e, mast.Maplet):
        return expr_free_names(e.left, bound) | expr_free_names(e.right, bound)
    if isinstance(e, mast.Unary):
        return expr_free_names(e.operand, bound)
    if isinstance(e, mast.Binary):
        return expr_free_names(e.left, bound) | expr_free_names(e.right, bound)
    if isinstance(e, mast.Quantifier):
        inner = bound | {name for name, _ in e.vars}
        return expr_free_names(e.body, inner)
    if isinstance(e, mast.Call):
        out = set() if e.func in BUILTINS or e.func in bound else {e.func}
        for a in e.args:
            out |= expr_free_names(a, bound)
        return out
    raise TypeError(f"not an expression: {e!r}")  # pragma: no cover


def check_formula_names(f: va.Formula, space: StateSpace) -> None:
    """Raise E-ENG-001 if the formula mentions names the space cannot bind."""
    known = set(space.variables) | set(space.env.values) | set(space.env.enums)
    unknown: set[str] = set()
    for atom in atoms_of(f):
        unknown |= expr_free_names(atom.pred) - known
    if unknown:
        names = ", ".join(sorted(unknown))
        raise EngineError(
            "E-ENG-001",
            f"formula references names absent from machine {space.machine.name}: {names}",
        )


def x_depth(f: va.Formula) -> int:
    if isinstance(f, va.Next):
        return 1 + x_depth(f.arg)
    if isinstance(f, (va.Not, va.Globally, va.Eventually)):
        return x_depth(f.arg)
    if isinstance(f, (va.And, va.Or, va.Implies, va.Until)):
        return max(x_depth(f.left), x_depth(f.right))
    return 0


def count_eventualities(f: va.Formula) -> int:
    if isinstance(f, (va.Eventually, va.Until)):
        inner = (
            count_eventualities(f.arg)
            if isinstance(f, va.Eventually)
            else count_eventualities(f.left) + count_eventualities(f.right)
        )
        return 1 + inner
    if isinstance(f, (va.Not, va.Globally, va.Next)):
        return count_eventualities(f.arg)
    if isinstance(f, (va.And, va.Or, va.Implies)):
        return count_eventualities(f.left) + count_eventualities(f.right)
    return 0
