"""Brute-force LTL oracle: enumerate lassos and evaluate the formula on each.

Shares nothing with the tableau checker except the run-graph construction
and the atom semantics, so verdict agreement between the two is meaningful
evidence of correctness.  FAIL (a violating lasso was found) is sound at any
bound; PASS is only claimed when the search length covers the space's stem
and cycle bounds, otherwise E-ENG-030 reports the bound as insufficient.
"""
from __future__ import annotations

from vdd.errors import EngineError
from vdd.specml.explore import StateSpace, Transition
from vdd.volang import ast as va

from .lasso import eval_on_lasso
from .ltl import _tarjan
from .results import Verdict
from .runs import (
    AtomEvaluator,
    build_edges,
    check_formula_names,
    count_eventualities,
    normalize,
    x_depth,
)


def coverage_bound(formula: va.Formula, space: StateSpace) -> int:
    """Lasso length that exhausts simple stems and cycles, with slack for
    nested next-steps and eventualities."""
    n = len(space.states)
    edges, _ = build_edges(space)
    state_ids = {s: i for i, s in enumerate(space.states)}
    adj: list[list[int]] = [[] for _ in space.states]
    for e in edges:
        adj[state_ids[e.src]].append(state_ids[e.dst])
    largest = max((len(c) for c in _tarjan(adj)), default=1)
    f = normalize(formula)
    return n + largest + x_depth(f) + count_eventualities(f)


def find_violating_lasso(
    formula: va.Formula,
    space: StateSpace,
    max_len: int,
    start_states: frozenset | None = None,
) -> tuple[tuple[Transition, ...], tuple[Transition, ...]] | None:
    """First lasso (stem+cycle, total length <= max_len) falsifying the
    formula, enumerated depth-first in edge order; None if there is none."""
    f = normalize(formula)
    atoms = AtomEvaluator(space)
    edges, out_index = build_edges(space)
    if start_states is None:
        starts = list(dict.fromkeys(space.initial))
    else:
        starts = [s for s in space.states if s in start_states]

    found: list[tuple[tuple[Transition, ...], tuple[Transition, ...]]] = []

    def search(state, path_edges: list[int], path_states: list) -> bool:
        for e in out_index.get(state, ()):
            dst = edges[e].dst
            path_edges.append(e)
            for j, sj in enumerate(path_states):
                if sj == dst:
                    stem = tuple(edges[i] for i in path_edges[:j])
                    cycle = tuple(edges[i] for i in path_edges[j:])
                    if not eval_on_lasso(f, atoms, stem, cycle):
                        found.append((stem, cycle))
                        path_edges.pop()
                        return True
            if len(path_edges) < max_len:
                path_states.append(dst)
                if search(dst, path_edges, path_states):
                    path_states.pop()
                    path_edges.pop()
                    return True
                path_states.pop()
            path_edges.pop()
        return False

    for s in starts:
        if search(s, [], [s]):
            return found[0]
    return None


def oracle_ltl(
    formula: va.Formula,
    space: StateSpace,
    max_len: int | None = None,
    start_states: frozenset | None = None,
) -> Verdict:
    """Brute-force verdict for a formula over all runs from the start states."""
    if space.truncated:
        return Verdict.INCONCLUSIVE
    check_formula_names(normalize(formula), space)
    bound = coverage_bound(formula, space)
    if max_len is None:
        max_len = bound
    if find_violating_lasso(formula, space, max_len, start_states) is not None:
        return Verdict.FAIL
    if max_len < bound:
        raise EngineError(
            "E-ENG-030",
            f"lasso bound {max_len} cannot certify PASS (needs {bound})",
        )
    return Verdict.PASS
