"""The automaton-based checker: verdicts, counterexample lassos, carriers."""
from __future__ import annotations

import pytest

from vdd.engine.lasso import eval_on_lasso
from vdd.engine.ltl import build_automaton, eval_ltl, _nnf, _to_ir
from vdd.engine.results import Lasso, Verdict
from vdd.engine.runs import AtomEvaluator, normalize
from vdd.errors import EngineError
from vdd.specml import explore, parse_machine
from vdd.volang import ast as va
from vdd.volang.parser import parse_vo

from test_lasso_eval import CLIMB, LIFT, form

SPACE = explore(LIFT)
CLIMB_SPACE = explore(CLIMB)


def check(text, space=SPACE, starts=None):
    return eval_ltl(form(text), space, start_states=starts)


def assert_replayable(result, text, space=SPACE):
    """FAIL evidence must be a well-formed lasso on which the formula is
    actually false — judged by the independent evaluator."""
    lasso = result.evidence
    assert isinstance(lasso, Lasso)
    run = list(lasso.stem) + list(lasso.cycle)
    for a, b in zip(run, run[1:]):
        assert a.dst == b.src
    assert lasso.cycle[-1].dst == lasso.cycle[0].src
    assert not eval_on_lasso(
        normalize(form(text)), AtomEvaluator(space), lasso.stem, lasso.cycle
    )


# ---- verdicts on the 3-state machine ---------------------------------------

def test_safety_pass_with_carrier():
    result = check("G {floor >= 0}")
    assert result.verdict == Verdict.PASS
    assert result.carrier == frozenset({(0,), (1,), (2,)})
    assert result.evidence is None


def test_safety_fail():
    result = check("G {floor < 2}")
    assert result.verdict == Verdict.FAIL
    assert_replayable(result, "G {floor < 2}")
    # shortest stem: reach floor 2 in two steps
    assert result.evidence.start == (0,)


def test_liveness_fail_run_avoids_the_target():
    result = check("F {floor = 2}")
    assert result.verdict == Verdict.FAIL
    assert_replayable(result, "F {floor = 2}")
    visited = {t.src for t in result.evidence.cycle}
    assert (2,) not in visited


def test_next_and_until():
    assert check("X {floor = 1}").verdict == Verdict.PASS  # only inc leaves 0
    assert check("{floor = 0} U {floor = 1}").verdict == Verdict.PASS
    result = check("{floor = 0} U {floor = 2}")
    assert result.verdict == Verdict.FAIL
    assert_replayable(result, "{floor = 0} U {floor = 2}")


def test_fg_keeps_standard_reading():
    result = check("FG({floor = 0})")
    assert result.verdict == Verdict.FAIL
    assert_replayable(result, "FG({floor = 0})")


def test_gf_normalizes_to_an_eventuality():
    # G(F x) is checked as F x; here that makes the formula trivially true
    # at the start states.
    assert check("GF({floor = 0})").verdict == Verdict.PASS
    assert normalize(form("GF({floor = 0})")) == form("F {floor = 0}")
    assert normalize(form("FG({floor = 0})")) == form("FG({floor = 0})")
    assert normalize(form("X(GF({p}))")) == form("XF({p})")


def test_gf_implication_reads_as_eventualities():
    # In the climb machine every run changes state at least once but never
    # reaches floor 9, so the rewritten form F(change) => F(impossible)
    # fails; the textbook infinitely-often reading would pass it vacuously.
    result = check(
        "GF(BA(floor /= floor$0)) => GF(BA(floor = 9))", space=CLIMB_SPACE
    )
    assert result.verdict == Verdict.FAIL
    assert_replayable(
        result, "GF(BA(floor /= floor$0)) => GF(BA(floor = 9))", space=CLIMB_SPACE
    )


def test_deadlock_runs_stutter_forever():
    # All climb runs end stuttering at 2, so "eventually always 2" holds.
    assert check("FG({floor = 2})", space=CLIMB_SPACE).verdict == Verdict.PASS
    assert check("F(BA(floor = floor$0))", space=CLIMB_SPACE).verdict == Verdict.PASS


def test_ba_atoms_over_transitions():
    assert check("G(BA(floor /= floor$0))").verdict == Verdict.PASS  # lift never stalls
    result = check("G(BA(floor = floor$0 + 1))")
    assert result.verdict == Verdict.FAIL  # dec steps exist
    assert_replayable(result, "G(BA(floor = floor$0 + 1))")


# ---- start states, carriers, errors ----------------------------------------

def test_start_states_override():
    result = check("G {floor >= 1}", space=CLIMB_SPACE, starts=frozenset({(1,)}))
    assert result.verdict == Verdict.PASS
    assert result.carrier == frozenset({(1,), (2,)})
    assert check("G {floor >= 1}", space=CLIMB_SPACE).verdict == Verdict.FAIL


def test_empty_start_states_pass_vacuously():
    result = check("G {floor = 99}", starts=frozenset())
    assert result.verdict == Verdict.PASS
    assert result.carrier == frozenset()


def test_unknown_name_is_an_engine_error():
    with pytest.raises(EngineError) as info:
        check("G {ghost = 1}")
    assert info.value.code == "E-ENG-001"


def test_truncated_space_is_inconclusive():
    clipped = explore(LIFT, cap=2)
    assert clipped.truncated
    result = eval_ltl(form("G {floor >= 0}"), clipped)
    assert result.verdict == Verdict.INCONCLUSIVE
    assert "cap" in result.note


def test_deterministic_evidence():
    a = check("F {floor = 2}")
    b = check("F {floor = 2}")
    assert a.evidence == b.evidence


# ---- automaton construction ------------------------------------------------

def build(text):
    atoms = []
    ir = _nnf(_to_ir(form(text), atoms))
    return build_automaton(ir), atoms


def test_automaton_shape_for_until():
    aut, atoms = build("{p} U {q}")
    assert len(atoms) == 2
    assert len(aut.accept) == 1  # one acceptance set per until
    assert aut.init
    assert all(isinstance(ns, list) for ns in aut.succ)


def test_automaton_shape_for_safety():
    aut, _ = build("G {p}")
    assert aut.accept == []  # release form has no eventuality


def test_nested_untils_get_separate_acceptance_sets():
    aut, _ = build("F({p} U {q})")
    assert len(aut.accept) == 2
