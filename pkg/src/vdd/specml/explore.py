"""Breadth-first construction of a machine's reachable state space.

States are tuples of variable values in declaration order.  Events are tried
in declaration order and parameter bindings in canonical value order, so the
discovered space — state list, transition list, shortest-path parents — is
fully deterministic.  INITIALISATION produces the initial states and is not
recorded as a transition.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from vdd.errors import EvalError
from vdd.specml import ast
from vdd.specml.eval import Env, build_env, conform, eval_expr, resolve_type
from vdd.specml.values import Type, Value, cardinality, enumerate_type, fmt_value

DEFAULT_CAP = 100_000

State = tuple

# Guard failures that disable a binding instead of aborting exploration.
_GUARD_FILTERED = ("E-EVAL-001", "E-EVAL-002")


@dataclass(frozen=True)
class Transition:
    src: State
    event: str
    binding: tuple[tuple[str, Value], ...]
    dst: State

    def label(self) -> str:
        if not self.binding:
            return self.event
        args = " ".join(f"{n}={fmt_value(v)}" for n, v in self.binding)
        return f"{self.event} {args}"


@dataclass
class StateSpace:
    machine: ast.MachineSpec
    variables: tuple[str, ...]
    var_types: dict[str, Type]
    env: Env
    initial: list[State]
    states: list[State]
    transitions: list[Transition]
    truncated: bool
    parents: dict[State, Transition | None]
    cap: int
    _adj: dict[State, list[Transition]] | None = field(default=None, repr=False)

    def state_env(self, state: State) -> Env:
        return self.env.child(dict(zip(self.variables, state)))

    def fmt_state(self, state: State) -> str:
        return ", ".join(f"{n}={fmt_value(v)}" for n, v in zip(self.variables, state))

    def successors(self, state: State) -> list[Transition]:
        if self._adj is None:
            adj: dict[State, list[Transition]] = {s: [] for s in self.states}
            for t in self.transitions:
                adj[t.src].append(t)
            self._adj = adj
        return self._adj.get(state, [])

    def trace_to(self, state: State) -> list[Transition]:
        """Shortest transition path from an initial state (BFS parents)."""
        steps: list[Transition] = []
        cur = state
        while True:
            parent = self.parents[cur]
            if parent is None:
                break
            steps.append(parent)
            cur = parent.src
        steps.reverse()
        return steps


def _event_bindings(event: ast.EventSpec, env: Env) -> Iterator[dict[str, Value]]:
    if not event.params:
        yield {}
        return
    domains = []
    for p in event.params:
        t = resolve_type(p.type, env)
        if cardinality(t) is None:
            raise EvalError("E-EVAL-006", f"cannot enumerate type {t} of parameter {p.name!r}", p.span)
        domains.append(list(enumerate_type(t)))
    names = [p.name for p in event.params]
    for combo in itertools.product(*domains):
        yield dict(zip(names, combo))


def _enabled(event: ast.EventSpec, env: Env) -> bool:
    for g in event.guards:
        try:
            if not eval_expr(g, env):
                return False
        except EvalError as exc:
            if exc.code in _GUARD_FILTERED:
                return False
            raise
    return True


def _apply(
    event: ast.EventSpec,
    env: Env,
    current: dict[str, Value],
    variables: Sequence[str],
    var_types: dict[str, Type],
) -> State:
    new_vals = dict(current)
    for a in event.actions:
        try:
            v = eval_expr(a.expr, env)
        except EvalError as exc:
            state_txt = ", ".join(f"{n}={fmt_value(w)}" for n, w in current.items()) or "<initial>"
            raise EvalError(exc.code, f"{exc.message} (in {event.name} at state {state_txt})", exc.span) from None
        new_vals[a.var] = conform(v, var_types[a.var], a.expr)
    missing = [n for n in variables if n not in new_vals]
    if missing:
        raise EvalError("E-EVAL-006", f"{event.name} leaves {missing[0]!r} unassigned", event.span)
    return tuple(new_vals[n] for n in variables)


def explore(
    machine: ast.MachineSpec,
    contexts: Sequence[ast.ContextSpec] = (),
    cap: int = DEFAULT_CAP,
) -> StateSpace:
    env = build_env(contexts)
    variables = machine.variable_names
    var_types = {v.name: resolve_type(v.type, env) for v in machine.variables}

    init = machine.event(ast.INIT_EVENT)
    if init is None:
        raise EvalError("E-EVAL-006", f"machine {machine.name} has no INITIALISATION", machine.span)

    initial: list[State] = []
    states: list[State] = []
    seen: set[State] = set()
    parents: dict[State, Transition | None] = {}
    transitions: list[Transition] = []
    truncated = False

    for binding in _event_bindings(init, env):
        benv = env.child(binding)
        if not _enabled(init, benv):
            continue
        dst = _apply(init, benv, {}, variables, var_types)
        if dst in seen:
            continue
        if len(states) >= cap:
            truncated = True
            continue
        seen.add(dst)
        states.append(dst)
        initial.append(dst)
        parents[dst] = None

    queue: deque[State] = deque(states)
    while queue:
        src = queue.popleft()
        senv = env.child(dict(zip(variables, src)))
        current = dict(zip(variables, src))
        for event in machine.events:
            if event.name == ast.INIT_EVENT:
                continue
            for binding in _event_bindings(event, env):
                benv = senv.child(binding)
                if not _enabled(event, benv):
                    continue
                dst = _apply(event, benv, current, variables, var_types)
                if dst not in seen and len(states) >= cap:
                    truncated = True
                    continue
                t = Transition(src, event.name, tuple(binding.items()), dst)
                transitions.append(t)
                if dst not in seen:
                    seen.add(dst)
                    states.append(dst)
                    parents[dst] = t
                    queue.append(dst)

    return StateSpace(
        machine=machine,
        variables=variables,
        var_types=var_types,
        env=env,
        initial=initial,
        states=states,
        transitions=transitions,
        truncated=truncated,
        parents=parents,
        cap=cap,
    )


@dataclass(frozen=True)
class InvariantViolation:
    label: str
    state: State

    def __str__(self) -> str:
        return f"invariant {self.label} violated"


def check_invariants(space: StateSpace) -> list[InvariantViolation]:
    """All (invariant, state) violations, in BFS discovery order."""
    violations: list[InvariantViolation] = []
    for state in space.states:
        env = space.state_env(state)
        for inv in space.machine.invariants:
            if not eval_expr(inv.pred, env):
                violations.append(InvariantViolation(inv.label, state))
    return violations


def export_transitions(space: StateSpace) -> list[str]:
    lines = [f"({space.fmt_state(s)})  [initial]" for s in space.initial]
    for t in space.transitions:
        lines.append(f"({space.fmt_state(t.src)}) -[{t.label()}]-> ({space.fmt_state(t.dst)})")
    return lines
