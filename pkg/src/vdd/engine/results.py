"""Verdicts, evidence shapes, and result trees for validation runs.

Evidence is kept structural (real `Transition` objects and state tuples) so
it can be replayed through the step semantics; textual rendering for reports
lives alongside so every frontend prints identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from vdd.errors import Diagnostic
from vdd.specml.explore import StateSpace, Transition
from vdd.volang import ast as va

STUTTER = ""  # event name of the implicit self-loop completing a deadlock


class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value


def and3(a: Verdict, b: Verdict) -> Verdict:
    """Strong-Kleene conjunction: FAIL wins, then INCONCLUSIVE."""
    if Verdict.FAIL in (a, b):
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in (a, b):
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


def or3(a: Verdict, b: Verdict) -> Verdict:
    """Strong-Kleene disjunction: PASS wins, then INCONCLUSIVE."""
    if Verdict.PASS in (a, b):
        return Verdict.PASS
    if Verdict.INCONCLUSIVE in (a, b):
        return Verdict.INCONCLUSIVE
    return Verdict.FAIL


@dataclass(frozen=True)
class Lasso:
    """A stem plus a nonempty cycle of transitions: one infinite run."""

    stem: tuple[Transition, ...]
    cycle: tuple[Transition, ...]

    @property
    def start(self):
        first = self.stem[0] if self.stem else self.cycle[0]
        return first.src


@dataclass(frozen=True)
class StateEvidence:
    """A single state plus a transition path leading to it."""

    state: tuple
    trace: tuple[Transition, ...] = ()


@dataclass(frozen=True)
class StepFailure:
    """A scenario step (1-based) that was not enabled in some run state."""

    step: int
    event: str
    state: tuple


Evidence = Lasso | StateEvidence | StepFailure | None


@dataclass(frozen=True)
class VTResult:
    """Outcome of one validation task."""

    verdict: Verdict
    evidence: Evidence = None
    carrier: frozenset | None = None
    diagnostic: Diagnostic | None = None
    note: str | None = None


@dataclass(frozen=True)
class VOResult:
    """Outcome of an obligation expression, mirroring its tree."""

    verdict: Verdict
    expr: va.VOExpr
    task: VTResult | None = None
    children: tuple["VOResult | None", ...] = ()
    carrier: frozenset | None = None

    def leaves(self) -> list[VTResult]:
        if self.task is not None:
            return [self.task]
        out: list[VTResult] = []
        for child in self.children:
            if child is not None:
                out.extend(child.leaves())
        return out


def is_stutter(t: Transition) -> bool:
    return t.event == STUTTER


def transition_text(space: StateSpace, t: Transition) -> str:
    if is_stutter(t):
        return f"(stutter at {space.fmt_state(t.src)})"
    return f"({space.fmt_state(t.src)}) -[{t.label()}]-> ({space.fmt_state(t.dst)})"


def evidence_text(space: StateSpace, ev: Evidence) -> str:
    if ev is None:
        return ""
    if isinstance(ev, Lasso):
        stem = "; ".join(transition_text(space, t) for t in ev.stem)
        cycle = "; ".join(transition_text(space, t) for t in ev.cycle)
        parts = [f"start ({space.fmt_state(ev.start)})"]
        if stem:
            parts.append(f"stem {stem}")
        parts.append(f"cycle {cycle}")
        return "; ".join(parts)
    if isinstance(ev, StateEvidence):
        state = f"state ({space.fmt_state(ev.state)})"
        if not ev.trace:
            return state
        path = "; ".join(transition_text(space, t) for t in ev.trace)
        return f"{state} via {path}"
    if isinstance(ev, StepFailure):
        return f"step {ev.step} ({ev.event}) not enabled in ({space.fmt_state(ev.state)})"
    raise TypeError(f"not evidence: {ev!r}")  # pragma: no cover


def _transition_json(space: StateSpace, t: Transition) -> dict:
    if is_stutter(t):
        return {"stutter": space.fmt_state(t.src)}
    return {
        "event": t.event,
        "binding": {name: str(value) for name, value in t.binding},
        "from": space.fmt_state(t.src),
        "to": space.fmt_state(t.dst),
    }


def evidence_json(space: StateSpace, ev: Evidence):
    if ev is None:
        return None
    if isinstance(ev, Lasso):
        return {
            "kind": "lasso",
            "stem": [_transition_json(space, t) for t in ev.stem],
            "cycle": [_transition_json(space, t) for t in ev.cycle],
        }
    if isinstance(ev, StateEvidence):
        return {
            "kind": "state",
            "state": space.fmt_state(ev.state),
            "trace": [_transition_json(space, t) for t in ev.trace],
        }
    if isinstance(ev, StepFailure):
        return {
            "kind": "step",
            "step": ev.step,
            "event": ev.event,
            "state": space.fmt_state(ev.state),
        }
    raise TypeError(f"not evidence: {ev!r}")  # pragma: no cover
