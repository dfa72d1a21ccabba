"""The enumeration oracle and its agreement with the automaton checker."""
from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from vdd.engine.lasso import eval_on_lasso
from vdd.engine.ltl import eval_ltl
from vdd.engine.oracle import coverage_bound, find_violating_lasso, oracle_ltl
from vdd.engine.results import Verdict
from vdd.engine.runs import AtomEvaluator, count_eventualities, normalize, x_depth
from vdd.errors import EngineError
from vdd.specml import explore, parse_machine
from vdd.volang import ast as va

from test_lasso_eval import CLIMB, LIFT, form

SPACE = explore(LIFT)
CLIMB_SPACE = explore(CLIMB)


# ---- the bound -------------------------------------------------------------

def test_formula_measures():
    assert x_depth(form("XXX {p}")) == 3
    assert x_depth(form("G(X {p} & X(X {q}))")) == 2
    assert x_depth(form("{p} U {q}")) == 0
    assert count_eventualities(form("F({p} U {q})")) == 2
    assert count_eventualities(form("G {p}")) == 0
    assert count_eventualities(form("GF({p})")) == 1  # after normalization: F
    assert count_eventualities(form("F {p} => F {q}")) == 2


def test_coverage_bound_adds_states_cycle_and_formula_slack():
    # lift: 3 states, all in one strongly connected component
    assert coverage_bound(form("G {floor = 0}"), SPACE) == 3 + 3
    assert coverage_bound(form("F {floor = 0}"), SPACE) == 3 + 3 + 1
    assert coverage_bound(form("XX {floor = 0}"), SPACE) == 3 + 3 + 2
    # climb: 3 states, no cycle except the deadlock stutter loop
    assert coverage_bound(form("G {floor = 0}"), CLIMB_SPACE) == 3 + 1


# ---- the search ------------------------------------------------------------

def test_violating_lasso_is_a_real_witness():
    lasso = find_violating_lasso(form("G {floor < 2}"), SPACE, 6)
    assert lasso is not None
    stem, cycle = lasso
    run = list(stem) + list(cycle)
    for a, b in zip(run, run[1:]):
        assert a.dst == b.src
    assert cycle[-1].dst == cycle[0].src
    assert not eval_on_lasso(
        normalize(form("G {floor < 2}")), AtomEvaluator(SPACE), stem, cycle
    )


def test_no_violation_returns_none():
    assert find_violating_lasso(form("G {floor >= 0}"), SPACE, 6) is None


def test_search_respects_the_length_bound():
    # falsifying G(floor < 2) needs three edges (0-1-2 plus a cycle edge)
    assert find_violating_lasso(form("G {floor < 2}"), SPACE, 2) is None
    assert find_violating_lasso(form("G {floor < 2}"), SPACE, 3) is not None


def test_start_states_narrow_the_search():
    f = form("G {floor >= 1}")
    assert find_violating_lasso(f, CLIMB_SPACE, 6, frozenset({(1,)})) is None
    assert find_violating_lasso(f, CLIMB_SPACE, 6) is not None


# ---- verdicts --------------------------------------------------------------

def test_oracle_verdicts():
    assert oracle_ltl(form("G {floor >= 0}"), SPACE) == Verdict.PASS
    assert oracle_ltl(form("G {floor < 2}"), SPACE) == Verdict.FAIL
    assert oracle_ltl(form("F {floor = 2}"), SPACE) == Verdict.FAIL
    assert oracle_ltl(form("FG({floor = 2})"), CLIMB_SPACE) == Verdict.PASS


def test_fail_is_sound_at_any_bound_but_pass_is_not():
    assert oracle_ltl(form("G {floor < 2}"), SPACE, max_len=3) == Verdict.FAIL
    with pytest.raises(EngineError) as info:
        oracle_ltl(form("G {floor >= 0}"), SPACE, max_len=3)
    assert info.value.code == "E-ENG-030"


def test_truncated_space_is_inconclusive():
    clipped = explore(LIFT, cap=2)
    assert oracle_ltl(form("G {floor >= 0}"), clipped) == Verdict.INCONCLUSIVE


def test_unknown_name_is_an_engine_error():
    with pytest.raises(EngineError) as info:
        oracle_ltl(form("G {ghost = 0}"), SPACE)
    assert info.value.code == "E-ENG-001"


# ---- agreement with the automaton checker ----------------------------------

WIDE = parse_machine(
    """\
machine Wide
  variables
    x : 0..3
    busy : bool
  events
    event INITIALISATION
      then
        x := 0
        busy := false
      end
    event step
      when x < 3
      then
        x := x + 1
        busy := not busy
      end
    event reset
      when x = 3
      then
        x := 0
      end
    event toggle
      when x = 2
      then
        busy := not busy
      end
  end
end
"""
)
WIDE_SPACE = explore(WIDE)

_atoms = st.sampled_from(
    [
        "{x = 0}",
        "{x = 3}",
        "{busy}",
        "{x > 1}",
        "BA(x = x$0 + 1)",
        "BA(busy /= busy$0)",
    ]
).map(form)


def _formulas():
    return st.recursive(
        _atoms,
        lambda kids: st.one_of(
            kids.map(va.Not),
            kids.map(va.Globally),
            kids.map(va.Eventually),
            kids.map(va.Next),
            st.tuples(kids, kids).map(lambda p: va.And(*p)),
            st.tuples(kids, kids).map(lambda p: va.Or(*p)),
            st.tuples(kids, kids).map(lambda p: va.Implies(*p)),
            st.tuples(kids, kids).map(lambda p: va.Until(*p)),
        ),
        max_leaves=5,
    )


@settings(max_examples=120, deadline=None)
@given(_formulas())
def test_checker_and_oracle_agree(formula):
    assert eval_ltl(formula, WIDE_SPACE).verdict == oracle_ltl(formula, WIDE_SPACE)


@settings(max_examples=60, deadline=None)
@given(_formulas())
def test_checker_and_oracle_agree_from_interior_start_states(formula):
    assert eval_ltl(formula, WIDE_SPACE, frozenset({(2, False)})).verdict == oracle_ltl(
        formula, WIDE_SPACE, start_states=frozenset({(2, False)})
    )
