"""Refinement-plan derivation: Guidelines 1-5 mechanized over problem frames.

Ordering: machine-adjacent domains by strictly descending incoming degree
(ties broken by name), then non-adjacent domains.  Sub-problem expansion is a
per-sub-frame or per-domain choice: immediate domains are introduced with (or
right after) their parent, deferred ones become later vertical-refinement
steps.  Justification codes carried on each step:

    2   first step: highest incoming degree
    1   horizontal refinement alongside an already-introduced neighbour
    5   no interface with the machine domain; postponed to the end
    3a  sub-problem expansion
    4   the group's only connection is a single shared interface
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from vdd.errors import ParseError, PlanError, SourceSpan
from vdd.frames import DomainKind, FrameSpec, incoming_degree, machine_adjacent, union_topology
from vdd.specml.ast import _span_field
from vdd.specml.lexer import TokenStream, tokenize

IMMEDIATE = "immediate"
DEFERRED = "deferred"

_JUSTIFICATION_ORDER = ("1", "2", "3a", "3b", "4", "5")


class StepKind(enum.Enum):
    INTRODUCE = "introduce"
    HORIZONTAL_REFINE = "horizontal"
    VERTICAL_REFINE = "vertical"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RefinementStep:
    kind: StepKind
    domains: tuple[str, ...]
    justification: tuple[str, ...]
    machine_slot: str


@dataclass(frozen=True)
class RefinementPlan:
    frame: str
    steps: tuple[RefinementStep, ...]
    deferred: Mapping[str, str] = field(default_factory=dict, compare=False)
    degrees: Mapping[str, int] = field(default_factory=dict, compare=False)

    def step_for(self, domain: str) -> RefinementStep | None:
        for step in self.steps:
            if domain in step.domains:
                return step
        return None

    def slot_domains(self) -> dict[str, tuple[str, ...]]:
        return {s.machine_slot: s.domains for s in self.steps}


def _sort_justification(just: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(just), key=_JUSTIFICATION_ORDER.index))


def _resolve_choices(
    refined: str, new_domains: list[str], choices: Mapping[str, str], span: SourceSpan
) -> tuple[list[str], list[str], bool]:
    """Split a sub-frame's new domains into (immediate, deferred) lists.

    Returns (immediate, deferred, group_deferral): group_deferral is true when
    the whole sub-frame was deferred by a single frame-level choice, which
    yields one grouped vertical step instead of one step per domain.
    """
    whole = choices.get(refined)
    per_domain = {d: choices.get(f"{refined}.{d}") for d in new_domains}
    immediate: list[str] = []
    deferred: list[str] = []
    for d in new_domains:
        choice = per_domain[d] or whole
        if choice is None:
            raise PlanError(
                "E-PLAN-002",
                f"domain {d!r} of sub-problem {refined} has no immediate/deferred choice",
                span,
            )
        if choice == IMMEDIATE:
            immediate.append(d)
        elif choice == DEFERRED:
            deferred.append(d)
        else:
            raise PlanError("E-PLAN-002", f"choice for {d!r} must be immediate or deferred, not {choice!r}", span)
    group = whole == DEFERRED and not any(per_domain.values())
    return immediate, deferred, group


def _single_shared_interface(topology: FrameSpec, machine: str, domains: tuple[str, ...]) -> bool:
    """True when the group's entire interface set is one interface that does
    not touch the machine domain — the vertical-relationship shape of
    Guideline 4."""
    touching = [i for i in topology.interfaces if any(i.touches(d) for d in domains)]
    if len(touching) != 1:
        return False
    return not touching[0].touches(machine)


def derive_plan(
    main: FrameSpec, subs: Mapping[str, FrameSpec], choices: Mapping[str, str]
) -> RefinementPlan:
    machine = main.machine_domains[0].name
    for refined, sub in subs.items():
        if main.domain(refined) is None:
            raise PlanError(
                "E-PLAN-001",
                f"sub-problem {sub.name} details {refined!r}, which is itself introduced by a "
                "sub-problem; nested expansion is not supported",
                sub.span,
            )

    topology = union_topology(main, subs)
    adjacent = machine_adjacent(main)
    degrees = {d.name: incoming_degree(main, d.name) for d in main.domains if d.kind != DomainKind.MACHINE}

    def order_key(name: str) -> tuple[int, str]:
        return (-degrees[name], name)

    ordered = sorted((n for n in degrees if n in adjacent), key=order_key) + sorted(
        (n for n in degrees if n not in adjacent), key=order_key
    )

    steps: list[tuple[StepKind | None, tuple[str, ...], list[str]]] = []
    deferred_map: dict[str, str] = {}

    for idx, name in enumerate(ordered):
        base_just = "2" if idx == 0 else ("1" if name in adjacent else "5")
        sub = subs.get(name)
        if sub is None:
            steps.append((None, (name,), [base_just]))
            continue
        new_domains = [d.name for d in sub.domains if main.domain(d.name) is None]
        immediate, deferred, group = _resolve_choices(name, new_domains, choices, sub.span)
        if deferred:
            # Partial expansion: immediate domains ride along with the parent.
            steps.append((None, (name, *immediate), [base_just, "3a"]))
            if group:
                deferred_groups: list[tuple[str, ...]] = [tuple(deferred)]
            else:
                deferred_groups = [(d,) for d in deferred]
            for grp in deferred_groups:
                just = ["3a"]
                if _single_shared_interface(topology, machine, grp):
                    just.append("4")
                steps.append((StepKind.VERTICAL_REFINE, grp, just))
                for d in grp:
                    deferred_map[d] = sub.name
        else:
            steps.append((None, (name,), [base_just, "3a"]))
            if immediate:
                steps.append((None, tuple(immediate), ["1"]))

    # Guideline 4 also groups whole components: domains whose only connection
    # is one interface shared among themselves collapse into a single
    # vertical step at the earliest position.
    merged: list[tuple[StepKind | None, tuple[str, ...], list[str]]] = []
    consumed: set[int] = set()
    for i, (kind, domains, just) in enumerate(steps):
        if i in consumed:
            continue
        if kind is None and len(domains) == 1:
            partners = [
                j
                for j in range(i + 1, len(steps))
                if steps[j][0] is None
                and len(steps[j][1]) == 1
                and _single_shared_interface(topology, machine, domains + steps[j][1])
            ]
            if partners and _single_shared_interface(topology, machine, domains):
                group_domains = domains + tuple(steps[j][1][0] for j in partners)
                if _single_shared_interface(topology, machine, group_domains):
                    consumed.update(partners)
                    merged.append((StepKind.VERTICAL_REFINE, group_domains, just + ["4"]))
                    continue
        merged.append((kind, domains, just))

    introduced: set[str] = {machine}
    final: list[RefinementStep] = []
    for idx, (kind, domains, just) in enumerate(merged):
        if kind is None:
            if idx == 0:
                kind = StepKind.INTRODUCE
            else:
                touches_known = any(
                    iface.touches(d) and any(iface.touches(p) for p in introduced)
                    for iface in topology.interfaces
                    for d in domains
                )
                kind = StepKind.HORIZONTAL_REFINE if touches_known else StepKind.INTRODUCE
        final.append(RefinementStep(kind, domains, _sort_justification(just), f"M{idx}"))
        introduced.update(domains)

    planned = [d for s in final for d in s.domains]
    expected = set(ordered) | {
        d.name for sub in subs.values() for d in sub.domains if main.domain(d.name) is None
    }
    missing = expected - set(planned)
    if missing:
        raise PlanError("E-PLAN-002", f"domain {sorted(missing)[0]!r} appears in no plan step", main.span)
    if len(planned) != len(set(planned)):
        dup = next(d for d in planned if planned.count(d) > 1)
        raise PlanError("E-PLAN-002", f"domain {dup!r} appears in more than one plan step", main.span)

    return RefinementPlan(main.name, tuple(final), deferred_map, degrees)


# ---------------------------------------------------------------------------
# Serialization


def print_plan(plan: RefinementPlan) -> str:
    lines = [f"plan {plan.frame}"]
    for step in plan.steps:
        doms = ", ".join(step.domains)
        just = ", ".join(step.justification)
        lines.append(f"  step {step.machine_slot}: {doms} [guidelines {just}] {step.kind}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_plan(text: str, file: str = "<string>") -> RefinementPlan:
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    ts.expect_word("plan")
    name = ts.expect("name", what="frame name").text
    ts.expect_newline()
    steps: list[RefinementStep] = []
    while True:
        ts.skip_newlines()
        if ts.at_word("end"):
            ts.advance()
            break
        ts.expect_word("step")
        slot = ts.expect("name", what="machine slot").text
        ts.expect("op", ":")
        domains = [ts.expect("name", what="domain name").text]
        while ts.accept("op", ","):
            domains.append(ts.expect("name", what="domain name").text)
        ts.expect("op", "[")
        ts.expect_word("guidelines")
        just: list[str] = []
        while not ts.check("op", "]"):
            tok = ts.advance()
            if tok.kind == "op" and tok.text == ",":
                continue
            # "3a" lexes as the integer 3 followed by the name "a".
            if tok.kind == "int" and ts.peek().kind == "name" and ts.peek().text in ("a", "b"):
                just.append(tok.text + ts.advance().text)
            else:
                just.append(tok.text)
        ts.expect("op", "]")
        kind_tok = ts.expect("name", what="step kind")
        try:
            kind = StepKind(kind_tok.text)
        except ValueError:
            raise ParseError("E-PARSE-001", f"unknown step kind {kind_tok.text!r}", kind_tok.span(file)) from None
        steps.append(RefinementStep(kind, tuple(domains), tuple(just), slot))
        ts.expect_newline()
    return RefinementPlan(name, tuple(steps))


# ---------------------------------------------------------------------------
# Explanations


_JUSTIFICATION_TEXT = {
    "1": "shares an interface with an already-introduced domain, so it refines the specification horizontally",
    "2": "has the highest incoming degree among machine-adjacent domains, so the plan starts here",
    "3a": "expands a sub-problem",
    "3b": "defers a sub-problem for later vertical refinement",
    "4": "its only connection is one shared interface — a vertical refinement relationship",
    "5": "has no interface with the machine domain, so it is postponed to the end",
}


def explain_step(plan: RefinementPlan, index: int) -> str:
    if not 0 <= index < len(plan.steps):
        raise PlanError("E-PLAN-002", f"no step {index} in plan {plan.frame}")
    step = plan.steps[index]
    doms = ", ".join(step.domains)
    parts = []
    for j in step.justification:
        text = _JUSTIFICATION_TEXT[j]
        if j == "2" and step.domains[0] in plan.degrees:
            text += f" (incoming degree {plan.degrees[step.domains[0]]})"
        parts.append(f"Guideline {j}: {text}")
    return f"Step {step.machine_slot} ({step.kind}) introduces {doms}. " + "; ".join(parts) + "."
