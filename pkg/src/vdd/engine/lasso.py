"""Exact formula evaluation on one lasso-shaped run.

This is deliberately naive — per-position truth tables with fixpoint sweeps
for F/G/U — so it shares no machinery with the automaton-based checker and
can serve as its oracle and as the replay judge for counterexamples.
"""
from __future__ import annotations

from vdd.specml.explore import Transition
from vdd.volang import ast as va

from .runs import AtomEvaluator


def eval_on_lasso(
    f: va.Formula,
    atoms: AtomEvaluator,
    stem: tuple[Transition, ...],
    cycle: tuple[Transition, ...],
) -> bool:
    """Truth of `f` at position 0 of the run stem + cycle^omega."""
    assert cycle, "a lasso needs a nonempty cycle"
    edges = list(stem) + list(cycle)
    first_cycle = len(stem)
    n = len(edges)

    def nxt(p: int) -> int:
        return p + 1 if p + 1 < n else first_cycle

    memo: dict[int, list[bool]] = {}

    def vals(g: va.Formula) -> list[bool]:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, (va.StateAtom, va.BaAtom)):
            out = [atoms.value(g, edges[p]) for p in range(n)]
        elif isinstance(g, va.Not):
            out = [not v for v in vals(g.arg)]
        elif isinstance(g, va.And):
            out = [a and b for a, b in zip(vals(g.left), vals(g.right))]
        elif isinstance(g, va.Or):
            out = [a or b for a, b in zip(vals(g.left), vals(g.right))]
        elif isinstance(g, va.Implies):
            out = [(not a) or b for a, b in zip(vals(g.left), vals(g.right))]
        elif isinstance(g, va.Next):
            child = vals(g.arg)
            out = [child[nxt(p)] for p in range(n)]
        elif isinstance(g, va.Eventually):
            out = _fixpoint(vals(g.arg), None, nxt, n, least=True)
        elif isinstance(g, va.Globally):
            out = _fixpoint(vals(g.arg), None, nxt, n, least=False)
        elif isinstance(g, va.Until):
            out = _fixpoint(vals(g.right), vals(g.left), nxt, n, least=True)
        else:
            raise TypeError(f"not a formula: {g!r}")  # pragma: no cover
        memo[id(g)] = out
        return out

    return vals(f)[0]


def _fixpoint(
    target: list[bool], hold: list[bool] | None, nxt, n: int, least: bool
) -> list[bool]:
    """Solve `v = target or (hold and v')` (least) or
    `v = target and (hold or v')` (greatest) over the lasso positions."""
    v = [not least] * n
    changed = True
    while changed:
        changed = False
        for p in range(n - 1, -1, -1):
            succ = v[nxt(p)]
            if least:
                nv = target[p] or ((hold[p] if hold is not None else True) and succ)
            else:
                nv = target[p] and ((hold[p] if hold is not None else False) or succ)
            if nv != v[p]:
                v[p] = nv
                changed = True
    return v
