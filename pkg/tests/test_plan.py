"""Refinement-plan derivation and its serialization."""
from __future__ import annotations

import pytest

from vdd.errors import PlanError
from vdd.frames import check_frames, parse_frame
from vdd.plan import RefinementPlan, StepKind, derive_plan, explain_step, parse_plan, print_plan

from conftest import CORPUS, GOLDEN
from test_frames import load_corpus_frames

AMAN_CHOICES = {"Schedule.Aircraft": "immediate", "Schedule.Time": "deferred", "User": "immediate"}
LIFT_CHOICES = {"Doors": "immediate"}


def plan_for(project, choices):
    main, subs = check_frames(load_corpus_frames(project))
    return derive_plan(main, subs, choices)


def test_aman_plan_matches_golden():
    plan = plan_for("aman", AMAN_CHOICES)
    assert print_plan(plan) == (GOLDEN / "aman.plan").read_text()


def test_lift_plan_matches_golden():
    plan = plan_for("lift", LIFT_CHOICES)
    assert print_plan(plan) == (GOLDEN / "lift.plan").read_text()


def test_plan_structure_details():
    plan = plan_for("aman", AMAN_CHOICES)
    assert plan.frame == "aman"
    first = plan.steps[0]
    assert first.kind == StepKind.INTRODUCE
    assert first.domains == ("Schedule", "Aircraft")
    assert first.machine_slot == "M0"
    time = plan.step_for("Time")
    assert time.kind == StepKind.VERTICAL_REFINE
    assert "4" in time.justification
    assert plan.deferred == {"Time": "schedule"}
    assert plan.degrees["Schedule"] == 1  # consumes only on interface a
    assert plan.slot_domains()["M3"] == ("Zoom", "HoldUnhold", "Move")


def test_all_deferred_groups_one_vertical_step():
    choices = dict(AMAN_CHOICES, **{"Schedule.Aircraft": "deferred", "Schedule.Time": "deferred"})
    plan = plan_for("aman", choices)
    kinds = [(s.kind, s.domains) for s in plan.steps]
    assert (StepKind.VERTICAL_REFINE, ("Aircraft",)) in kinds
    assert (StepKind.VERTICAL_REFINE, ("Time",)) in kinds
    # a frame-level deferral instead collapses the pair into one step
    grouped = plan_for("aman", {"Schedule": "deferred", "User": "immediate"})
    verticals = [s for s in grouped.steps if s.kind == StepKind.VERTICAL_REFINE]
    assert [s.domains for s in verticals] == [("Aircraft", "Time")]


def test_missing_choice_is_an_error():
    with pytest.raises(PlanError) as info:
        plan_for("aman", {"User": "immediate"})
    assert info.value.code == "E-PLAN-002"
    with pytest.raises(PlanError) as info:
        plan_for("aman", dict(AMAN_CHOICES, **{"Schedule.Time": "sometimes"}))
    assert info.value.code == "E-PLAN-002"


def test_nested_sub_problem_rejected():
    main = parse_frame("frame f\n  machine M\n  designed D\n  interfaces\n    M -> D\nend\n")
    orphan = parse_frame("frame x refines Ghost\n  designed Extra\nend\n")
    with pytest.raises(PlanError) as info:
        derive_plan(main, {"Ghost": orphan}, {"Ghost": "immediate"})
    assert info.value.code == "E-PLAN-001"


def test_print_parse_round_trip():
    for project, choices in (("aman", AMAN_CHOICES), ("lift", LIFT_CHOICES)):
        plan = plan_for(project, choices)
        again = parse_plan(print_plan(plan))
        assert print_plan(again) == print_plan(plan)
        assert [s.justification for s in again.steps] == [s.justification for s in plan.steps]


def test_parsed_plan_equality_ignores_annotations():
    plan = plan_for("lift", LIFT_CHOICES)
    assert parse_plan(print_plan(plan)) == RefinementPlan(plan.frame, plan.steps)


def test_explain_step():
    plan = plan_for("aman", AMAN_CHOICES)
    first = explain_step(plan, 0)
    assert first.startswith("Step M0 (introduce) introduces Schedule, Aircraft.")
    assert "incoming degree 1" in first
    assert "vertical refinement relationship" in explain_step(plan, 1)
    assert "postponed to the end" in explain_step(plan, 4)
    with pytest.raises(PlanError):
        explain_step(plan, 9)


def test_first_step_is_highest_degree_adjacent_domain():
    # Buttons has degree 0 and Display is not machine-adjacent; the plan must
    # not start with either.
    for project, choices, expect in (
        ("aman", AMAN_CHOICES, "Schedule"),
        ("lift", LIFT_CHOICES, "Floors"),
    ):
        plan = plan_for(project, choices)
        assert plan.steps[0].domains[0] == expect
        assert "2" in plan.steps[0].justification


def test_degree_tie_breaks_by_name():
    main = parse_frame(
        "frame f\n  machine M\n  designed B\n  designed A\n"
        "  interfaces\n    M -> A\n    M -> B\nend\n"
    )
    plan = derive_plan(main, {}, {})
    assert [s.domains for s in plan.steps] == [("A",), ("B",)]
