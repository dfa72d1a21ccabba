"""Automaton-based LTL checking over explored state spaces.

The negated formula goes through the on-the-fly tableau construction of
Gerth/Peled/Vardi/Wolper into a generalized Buchi automaton, which is
intersected with the run graph (edges plus deadlock stutter loops).  A
reachable strongly connected component meeting every acceptance set yields
a violating run, reported as a shortest-stem lasso; otherwise the formula
holds on all runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from vdd.specml.explore import StateSpace
from vdd.volang import ast as va

from .results import Lasso, Verdict, VTResult
from .runs import AtomEvaluator, build_edges, check_formula_names, normalize, reachable_from

TRUE = ("true",)
FALSE = ("false",)


def _to_ir(f: va.Formula, atoms: list[va.Formula]) -> tuple:
    """Lower to hashable tuples; atoms are indexed by object identity."""
    if isinstance(f, (va.StateAtom, va.BaAtom)):
        atoms.append(f)
        return ("atom", len(atoms) - 1)
    if isinstance(f, va.Not):
        return ("not", _to_ir(f.arg, atoms))
    if isinstance(f, va.And):
        return ("and", _to_ir(f.left, atoms), _to_ir(f.right, atoms))
    if isinstance(f, va.Or):
        return ("or", _to_ir(f.left, atoms), _to_ir(f.right, atoms))
    if isinstance(f, va.Implies):
        return ("or", ("not", _to_ir(f.left, atoms)), _to_ir(f.right, atoms))
    if isinstance(f, va.Next):
        return ("next", _to_ir(f.arg, atoms))
    if isinstance(f, va.Eventually):
        return ("until", TRUE, _to_ir(f.arg, atoms))
    if isinstance(f, va.Globally):
        return ("release", FALSE, _to_ir(f.arg, atoms))
    if isinstance(f, va.Until):
        return ("until", _to_ir(f.left, atoms), _to_ir(f.right, atoms))
    raise TypeError(f"not a formula: {f!r}")  # pragma: no cover


def _nnf(ir: tuple, pos: bool = True) -> tuple:
    head = ir[0]
    if head == "true":
        return TRUE if pos else FALSE
    if head == "false":
        return FALSE if pos else TRUE
    if head == "atom":
        return ir if pos else ("not", ir)
    if head == "not":
        return _nnf(ir[1], not pos)
    if head == "and":
        op = "and" if pos else "or"
        return (op, _nnf(ir[1], pos), _nnf(ir[2], pos))
    if head == "or":
        op = "or" if pos else "and"
        return (op, _nnf(ir[1], pos), _nnf(ir[2], pos))
    if head == "next":
        return ("next", _nnf(ir[1], pos))
    if head == "until":
        op = "until" if pos else "release"
        return (op, _nnf(ir[1], pos), _nnf(ir[2], pos))
    if head == "release":
        op = "release" if pos else "until"
        return (op, _nnf(ir[1], pos), _nnf(ir[2], pos))
    raise ValueError(f"bad ir: {ir!r}")  # pragma: no cover


def _is_literal(ir: tuple) -> bool:
    return ir[0] == "atom" or (ir[0] == "not" and ir[1][0] == "atom")


def _neg_literal(ir: tuple) -> tuple:
    return ir[1] if ir[0] == "not" else ("not", ir)


def _until_subformulas(ir: tuple) -> list[tuple]:
    out: list[tuple] = []

    def walk(g: tuple) -> None:
        head = g[0]
        if head == "until" and g not in out:
            out.append(g)
        if head in ("not", "next"):
            walk(g[1])
        elif head in ("and", "or", "until", "release"):
            walk(g[1])
            walk(g[2])

    walk(ir)
    return out


@dataclass
class _Node:
    incoming: set[int]
    new: set[tuple]
    old: set[tuple]
    nxt: set[tuple]


@dataclass
class Automaton:
    """Generalized Buchi automaton from the tableau construction."""

    literals: list[list[tuple[int, bool]]]  # per node: (atom index, wanted)
    succ: list[list[int]]
    init: list[int]
    accept: list[list[int]]  # one node-id list per until subformula


_INIT = -1  # pseudo node id marking automaton entry


def build_automaton(nnf_ir: tuple) -> Automaton:
    store: dict[tuple[frozenset, frozenset], int] = {}
    nodes: list[_Node] = []

    def expand(node: _Node) -> None:
        while node.new:
            f = min(node.new)
            node.new.discard(f)
            if f == TRUE:
                continue
            if f == FALSE or (_is_literal(f) and _neg_literal(f) in node.old):
                return  # contradictory branch dies
            if _is_literal(f):
                node.old.add(f)
                continue
            head = f[0]
            if head == "and":
                node.old.add(f)
                for g in (f[1], f[2]):
                    if g not in node.old:
                        node.new.add(g)
                continue
            if head == "next":
                node.old.add(f)
                node.nxt.add(f[1])
                continue
            # or / until / release split in two
            if head == "or":
                parts = (({f[1]}, set()), ({f[2]}, set()))
            elif head == "until":  # l U r  =  r or (l and X(l U r))
                parts = (({f[1]}, {f}), ({f[2]}, set()))
            else:  # l R r  =  (r and l) or (r and X(l R r))
                parts = (({f[2]}, {f}), ({f[1], f[2]}, set()))
            old = node.old | {f}
            for extra_new, extra_next in parts:
                expand(
                    _Node(
                        incoming=set(node.incoming),
                        new=node.new | (extra_new - old),
                        old=set(old),
                        nxt=node.nxt | extra_next,
                    )
                )
            return
        key = (frozenset(node.old), frozenset(node.nxt))
        existing = store.get(key)
        if existing is not None:
            nodes[existing].incoming |= node.incoming
            return
        store[key] = len(nodes)
        nodes.append(node)
        expand(_Node(incoming={store[key]}, new=set(node.nxt), old=set(), nxt=set()))

    expand(_Node(incoming={_INIT}, new={nnf_ir}, old=set(), nxt=set()))

    literals = []
    for node in nodes:
        lits = []
        for f in sorted(node.old):
            if f[0] == "atom":
                lits.append((f[1], True))
            elif f[0] == "not" and f[1][0] == "atom":
                lits.append((f[1][1], False))
        literals.append(lits)
    succ: list[list[int]] = [[] for _ in nodes]
    init: list[int] = []
    for target, node in enumerate(nodes):
        for source in sorted(node.incoming):
            if source == _INIT:
                init.append(target)
            else:
                succ[source].append(target)
    accept = []
    for u in _until_subformulas(nnf_ir):
        accept.append([i for i, node in enumerate(nodes) if u not in node.old or u[2] in node.old])
    return Automaton(literals=literals, succ=succ, init=init, accept=accept)


# ---------------------------------------------------------------------------
# Product search


def eval_ltl(
    formula: va.Formula, space: StateSpace, start_states: frozenset | None = None
) -> VTResult:
    """Check a formula over every run from the start states (initial states
    by default); FAIL carries a shortest-stem counterexample lasso."""
    if space.truncated:
        return VTResult(
            Verdict.INCONCLUSIVE,
            note="state space truncated at the exploration cap; universal verdicts are unavailable",
        )
    f = normalize(formula)
    check_formula_names(f, space)

    atoms: list[va.Formula] = []
    ir = _nnf(("not", _to_ir(f, atoms)))
    aut = build_automaton(ir)
    evaluator = AtomEvaluator(space)

    edges, out_index = build_edges(space)
    if start_states is None:
        starts = list(dict.fromkeys(space.initial))
    else:
        starts = [s for s in space.states if s in start_states]

    def lit_ok(edge_id: int, node_id: int) -> bool:
        edge = edges[edge_id]
        for atom_id, wanted in aut.literals[node_id]:
            if evaluator.value(atoms[atom_id], edge) != wanted:
                return False
        return True

    # Breadth-first discovery of the product, recording shortest stems.
    index: dict[tuple[int, int], int] = {}
    prod: list[tuple[int, int]] = []
    dist: list[int] = []
    parent: list[int] = []
    adj: list[list[int]] = []

    def discover(edge_id: int, node_id: int, d: int, par: int) -> int:
        key = (edge_id, node_id)
        got = index.get(key)
        if got is not None:
            return got
        index[key] = len(prod)
        prod.append(key)
        dist.append(d)
        parent.append(par)
        adj.append([])
        return index[key]

    start_set = set(starts)
    queue: list[int] = []
    for edge_id, edge in enumerate(edges):
        if edge.src in start_set:
            for node_id in aut.init:
                if lit_ok(edge_id, node_id):
                    queue.append(discover(edge_id, node_id, 0, -1))
    head = 0
    while head < len(queue):
        p = queue[head]
        head += 1
        edge_id, node_id = prod[p]
        dst = edges[edge_id].dst
        for edge2 in out_index.get(dst, ()):
            for node2 in aut.succ[node_id]:
                if lit_ok(edge2, node2):
                    before = len(prod)
                    q = discover(edge2, node2, dist[p] + 1, p)
                    adj[p].append(q)
                    if q == before:
                        queue.append(q)

    sccs = _tarjan(adj)
    accepting = _accepting_sccs(sccs, adj, prod, aut)
    if not accepting:
        carrier = reachable_from(space, starts)
        return VTResult(Verdict.PASS, carrier=carrier)

    scc_of: dict[int, int] = {}
    for i, comp in enumerate(sccs):
        for p in comp:
            scc_of[p] = i
    # Shortest stem: the earliest-discovered product state inside an
    # accepting component (BFS order sorts by distance already).
    entry = min(
        (p for comp_id in accepting for p in sccs[comp_id]),
        key=lambda p: (dist[p], p),
    )
    comp = set(sccs[scc_of[entry]])

    stem_nodes: list[int] = []
    p = entry
    while parent[p] != -1:
        p = parent[p]
        stem_nodes.append(p)
    stem_nodes.reverse()
    cycle_nodes = _accepting_cycle(entry, comp, adj, prod, aut)

    stem = tuple(edges[prod[p][0]] for p in stem_nodes)
    cycle = tuple(edges[prod[p][0]] for p in cycle_nodes)
    return VTResult(Verdict.FAIL, evidence=Lasso(stem, cycle))


def _tarjan(adj: list[list[int]]) -> list[list[int]]:
    """Iterative Tarjan; components come out in a deterministic order."""
    n = len(adj)
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index_of[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if index_of[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                sccs.append(comp)
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return sccs


def _accepting_sccs(
    sccs: list[list[int]], adj: list[list[int]], prod: list[tuple[int, int]], aut: Automaton
) -> list[int]:
    out = []
    for i, comp in enumerate(sccs):
        members = set(comp)
        has_cycle = len(comp) > 1 or any(v in adj[comp[0]] for v in comp)
        if not has_cycle:
            continue
        ok = True
        for acc in aut.accept:
            acc_set = set(acc)
            if not any(prod[p][1] in acc_set for p in comp):
                ok = False
                break
        if ok:
            out.append(i)
    return out


def _accepting_cycle(
    entry: int, comp: set[int], adj: list[list[int]], prod: list[tuple[int, int]], aut: Automaton
) -> list[int]:
    """A cycle through `entry` inside one component that visits every
    acceptance set; built from shortest in-component hops."""

    def bfs(src: int, goal) -> list[int]:
        # Path of product nodes from src to a goal node (possibly src itself
        # via a real cycle when require_step).
        seen = {src}
        q = [(src, [src])]
        while q:
            v, path = q.pop(0)
            for w in adj[v]:
                if w not in comp:
                    continue
                if goal(w):
                    return path + [w]
                if w not in seen:
                    seen.add(w)
                    q.append((w, path + [w]))
        raise AssertionError("accepting component lost its cycle")  # pragma: no cover

    path = [entry]
    for acc in aut.accept:
        acc_set = set(acc)
        if any(prod[p][1] in acc_set for p in path):
            continue
        tail = bfs(path[-1], lambda w: prod[w][1] in acc_set)
        path.extend(tail[1:])
    if len(path) == 1:
        close = bfs(path[-1], lambda w: w == entry)
        path.extend(close[1:])
    elif path[-1] != entry:
        close = bfs(path[-1], lambda w: w == entry)
        path.extend(close[1:])
    return path[:-1] if path[-1] == entry else path
