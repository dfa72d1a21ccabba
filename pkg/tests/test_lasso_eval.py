"""Truth of temporal formulas on single lasso runs, checked against hand
tables and against a walk-based evaluator that shares no code with the
fixpoint one."""
from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from vdd.engine.lasso import eval_on_lasso
from vdd.engine.results import STUTTER
from vdd.engine.runs import AtomEvaluator, build_edges
from vdd.specml import explore, parse_machine
from vdd.specml.explore import Transition
from vdd.volang import ast as va
from vdd.volang.parser import parse_vo

LIFT = parse_machine(
    """\
machine Lift
  variables
    floor : 0..2
  events
    event INITIALISATION
      then
        floor := 0
      end
    event inc
      when floor < 2
      then
        floor := floor + 1
      end
    event dec
      when floor > 0
      then
        floor := floor - 1
      end
  end
end
"""
)

CLIMB = parse_machine(
    """\
machine Climb
  variables
    floor : 0..2
  events
    event INITIALISATION
      then
        floor := 0
      end
    event inc
      when floor < 2
      then
        floor := floor + 1
      end
  end
end
"""
)

SPACE = explore(LIFT)
CLIMB_SPACE = explore(CLIMB)


def form(text):
    task = parse_vo("R/M: LTL(" + text + ")")[1]
    return task.formula


def edge(space, src, event):
    for t in space.transitions:
        if t.src == (src,) and t.event == event:
            return t
    raise LookupError((src, event))


T01 = edge(SPACE, 0, "inc")
T12 = edge(SPACE, 1, "inc")
T10 = edge(SPACE, 1, "dec")
T21 = edge(SPACE, 2, "dec")


def on(stem, cycle, text, space=SPACE):
    return eval_on_lasso(form(text), AtomEvaluator(space), tuple(stem), tuple(cycle))


# ---- hand-computed cases ---------------------------------------------------

def test_atoms_read_the_source_state():
    assert on([], [T01, T10], "{floor = 0}")
    assert not on([], [T10, T01], "{floor = 0}")


def test_ba_reads_the_whole_edge():
    assert on([], [T01, T10], "BA(floor = floor$0 + 1)")  # first edge is inc
    assert not on([], [T10, T01], "BA(floor = floor$0 + 1)")
    assert on([], [T10, T01], "BA(floor < floor$0)")


def test_globally_and_eventually_on_a_pure_cycle():
    cyc = [T01, T10]
    assert on([], cyc, "G {floor < 2}")
    assert not on([], cyc, "G {floor = 0}")
    assert on([], cyc, "F {floor = 1}")
    assert not on([], cyc, "F {floor = 2}")
    assert on([], cyc, "GF({floor = 0})")
    assert not on([], cyc, "FG({floor = 0})")


def test_next_wraps_into_the_cycle():
    cyc = [T01, T10]
    assert on([], cyc, "X {floor = 1}")
    assert not on([], cyc, "X {floor = 0}")
    assert on([], cyc, "XX {floor = 0}")  # wraps to position 0


def test_stem_prefix_is_not_part_of_the_loop():
    # 0 -inc-> 1, then loop 1 -inc-> 2 -dec-> 1
    assert on([T01], [T12, T21], "{floor = 0}")
    assert not on([T01], [T12, T21], "G {floor > 0}")  # position 0 has floor 0
    assert on([T01], [T12, T21], "X(G {floor > 0})")
    assert on([T01], [T12, T21], "GF({floor = 2})")
    assert not on([T01], [T12, T21], "F {floor = 0} & X(F {floor = 0})")


def test_until_needs_its_hold_chain():
    assert on([], [T01, T10], "{floor = 0} U {floor = 1}")
    assert not on([T01], [T12, T21], "{floor = 0} U {floor = 2}")  # gap at floor 1
    assert on([T01], [T12, T21], "{floor < 2} U {floor = 2}")
    # target at position 0 needs no hold at all
    assert on([], [T10, T01], "{floor = 9} U {floor = 1}")


def test_stutter_loop_models_staying_put():
    c01 = edge(CLIMB_SPACE, 0, "inc")
    c12 = edge(CLIMB_SPACE, 1, "inc")
    edges, _ = build_edges(CLIMB_SPACE)
    stutter = next(e for e in edges if e.event == STUTTER)
    assert stutter.src == stutter.dst == (2,)
    lasso = ([c01, c12], [stutter])
    assert on(*lasso, "FG({floor = 2})", space=CLIMB_SPACE)
    assert on(*lasso, "FG(BA(floor = floor$0))", space=CLIMB_SPACE)
    assert not on(*lasso, "GF(BA(floor = floor$0 + 1))", space=CLIMB_SPACE)


def test_boolean_connectives_are_positionwise():
    cyc = [T01, T10]
    assert on([], cyc, "{floor = 0} & X {floor = 1}")
    assert on([], cyc, "{floor = 1} or {floor = 0}")
    assert on([], cyc, "{floor = 1} => {floor = 2}")  # vacuous at position 0
    assert on([], cyc, "not {floor = 1}")


def test_cycle_must_be_nonempty():
    with pytest.raises(AssertionError):
        eval_on_lasso(form("{floor = 0}"), AtomEvaluator(SPACE), (T01,), ())


# ---- independent walk-based evaluator --------------------------------------

def walk_eval(f, atoms, stem, cycle):
    edges = list(stem) + list(cycle)
    n = len(edges)
    first = len(stem)

    def nxt(p):
        return p + 1 if p + 1 < n else first

    memo = {}

    def val(g, p):
        key = (id(g), p)
        if key in memo:
            return memo[key]
        memo[key] = False  # cut self-reference during cyclic exploration
        if isinstance(g, (va.StateAtom, va.BaAtom)):
            out = atoms.value(g, edges[p])
        elif isinstance(g, va.Not):
            out = not val(g.arg, p)
        elif isinstance(g, va.And):
            out = val(g.left, p) and val(g.right, p)
        elif isinstance(g, va.Or):
            out = val(g.left, p) or val(g.right, p)
        elif isinstance(g, va.Implies):
            out = (not val(g.left, p)) or val(g.right, p)
        elif isinstance(g, va.Next):
            out = val(g.arg, nxt(p))
        elif isinstance(g, va.Eventually):
            out = any_on_walk(g.arg, p)
        elif isinstance(g, va.Globally):
            out = not any_on_walk(va.Not(g.arg), p)
        else:
            assert isinstance(g, va.Until)
            out = until_on_walk(g, p)
        memo[key] = out
        return out

    def any_on_walk(g, p):
        q = p
        for _ in range(n + 1):
            if val(g, q):
                return True
            q = nxt(q)
        return False

    def until_on_walk(g, p):
        q = p
        for _ in range(n + 1):
            if val(g.right, q):
                return True
            if not val(g.left, q):
                return False
            q = nxt(q)
        return False

    return val(f, 0)


_atom_texts = (
    "{floor = 0}",
    "{floor = 1}",
    "{floor = 2}",
    "BA(floor = floor$0 + 1)",
    "BA(floor < floor$0)",
)


def _formulas():
    atoms = st.sampled_from(_atom_texts).map(form)
    return st.recursive(
        atoms,
        lambda kids: st.one_of(
            kids.map(va.Not),
            kids.map(va.Globally),
            kids.map(va.Eventually),
            kids.map(va.Next),
            st.tuples(kids, kids).map(lambda p: va.And(*p)),
            st.tuples(kids, kids).map(lambda p: va.Or(*p)),
            st.tuples(kids, kids).map(lambda p: va.Until(*p)),
        ),
        max_leaves=6,
    )


@settings(max_examples=200, deadline=None)
@given(_formulas(), st.lists(st.integers(0, 5), min_size=6, max_size=6))
def test_fixpoint_agrees_with_walk(formula, picks):
    # Drive a 6-edge walk from the initial state and close the lasso at the
    # first revisited state (guaranteed: only 3 states exist).
    walk, states = [], [(0,)]
    for k in picks:
        succ = SPACE.successors(states[-1])
        t = succ[k % len(succ)]
        walk.append(t)
        states.append(t.dst)
    r = next(i for i in range(1, len(states)) if states[i] in states[:i])
    j = states.index(states[r])
    stem, cycle = tuple(walk[:j]), tuple(walk[j:r])
    assert cycle
    atoms = AtomEvaluator(SPACE)
    assert eval_on_lasso(formula, atoms, stem, cycle) == walk_eval(
        formula, atoms, stem, cycle
    )
