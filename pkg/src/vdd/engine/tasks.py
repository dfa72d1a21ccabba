"""Evaluation of validation tasks and obligation expression trees.

Composition semantics: `&` and `or` always evaluate both sides (reports show
every leaf), combining verdicts in strong-Kleene three-valued logic; `;`
evaluates its right side from the carrier its left side passed on — final
states for scenarios, witnesses for reachability searches, every visited
state for passing invariant and temporal checks.
"""
from __future__ import annotations

from vdd.errors import Diagnostic, EngineError, EvalError
from vdd.specml.eval import eval_expr
from vdd.specml.explore import StateSpace, Transition
from vdd.volang import ast as va

from .ltl import eval_ltl
from .results import (
    StateEvidence,
    StepFailure,
    Verdict,
    VOResult,
    VTResult,
    and3,
    or3,
)

_TRUNCATED_NOTE = "state space truncated at the exploration cap; universal verdicts are unavailable"


def _ordered_starts(space: StateSpace, start_states: frozenset | None) -> list:
    if start_states is None:
        return list(dict.fromkeys(space.initial))
    return [s for s in space.states if s in start_states]


def _pred_holds(space: StateSpace, pred, state) -> bool:
    try:
        return bool(eval_expr(pred, space.state_env(state)))
    except EvalError as exc:
        raise EvalError(
            exc.code, f"{exc.message} in state ({space.fmt_state(state)})", exc.span
        ) from None


def eval_inv(pred, space: StateSpace, start_states: frozenset | None = None) -> VTResult:
    """PASS iff the predicate holds in every considered state: all reachable
    states by default, exactly the carrier when one is handed over."""
    if space.truncated:
        return VTResult(Verdict.INCONCLUSIVE, note=_TRUNCATED_NOTE)
    if start_states is None:
        states = space.states
    else:
        states = [s for s in space.states if s in start_states]
    for s in states:
        if not _pred_holds(space, pred, s):
            return VTResult(
                Verdict.FAIL,
                evidence=StateEvidence(s, tuple(space.trace_to(s))),
            )
    return VTResult(Verdict.PASS, carrier=frozenset(states))


def eval_exists(pred, space: StateSpace, start_states: frozenset | None = None) -> VTResult:
    """PASS iff some state reachable from the start states satisfies the
    predicate; evidence is the first witness with its access path, the
    carrier is every witness found."""
    starts = _ordered_starts(space, start_states)
    parents: dict = {s: None for s in starts}
    order = list(starts)
    head = 0
    while head < len(order):
        s = order[head]
        head += 1
        for t in space.successors(s):
            if t.dst not in parents:
                parents[t.dst] = t
                order.append(t.dst)
    witnesses = [s for s in order if _pred_holds(space, pred, s)]
    if witnesses:
        first = witnesses[0]
        trace: list[Transition] = []
        cur = first
        while parents[cur] is not None:
            trace.append(parents[cur])
            cur = parents[cur].src
        trace.reverse()
        return VTResult(
            Verdict.PASS,
            evidence=StateEvidence(first, tuple(trace)),
            carrier=frozenset(witnesses),
        )
    if space.truncated:
        return VTResult(Verdict.INCONCLUSIVE, note=_TRUNCATED_NOTE)
    return VTResult(Verdict.FAIL)


def eval_trace(task: va.TraceTask, space: StateSpace, start_states: frozenset | None = None) -> VTResult:
    """Run the scenario from every designated start state, following all
    matching bindings; every step must be enabled everywhere, and the final
    predicate (if any) must hold at every end state."""
    if space.truncated:
        return VTResult(Verdict.INCONCLUSIVE, note=_TRUNCATED_NOTE)
    frontier = _ordered_starts(space, start_states)
    for k, step in enumerate(task.steps, start=1):
        event = space.machine.event(step.event)
        if event is None:
            raise EngineError(
                "E-ENG-001", f"machine {space.machine.name} has no event {step.event!r}"
            )
        wanted = None
        if step.args:
            values = [eval_expr(a, space.env) for a in step.args]
            wanted = tuple((p.name, v) for p, v in zip(event.params, values))
        nxt: dict = {}
        for s in frontier:
            matches = [
                t
                for t in space.successors(s)
                if t.event == step.event and (wanted is None or t.binding == wanted)
            ]
            if not matches:
                label = step.event if wanted is None else Transition(s, step.event, wanted, s).label()
                return VTResult(
                    Verdict.FAIL,
                    evidence=StepFailure(k, step.event, s),
                    diagnostic=Diagnostic(
                        "E-ENG-010",
                        f"{label} not enabled at step {k} in state ({space.fmt_state(s)})",
                        task.span,
                    ),
                )
            for t in matches:
                nxt[t.dst] = None
        frontier = list(nxt)
    if task.final is not None:
        for s in frontier:
            if not _pred_holds(space, task.final, s):
                return VTResult(
                    Verdict.FAIL,
                    evidence=StateEvidence(s),
                    note=f"final predicate false in state ({space.fmt_state(s)})",
                )
    return VTResult(Verdict.PASS, carrier=frozenset(frontier))


def eval_task(task: va.VOExpr, space: StateSpace, start_states: frozenset | None = None) -> VTResult:
    if isinstance(task, va.LtlTask):
        return eval_ltl(task.formula, space, start_states)
    if isinstance(task, va.InvTask):
        return eval_inv(task.pred, space, start_states)
    if isinstance(task, va.ExistsTask):
        return eval_exists(task.pred, space, start_states)
    assert isinstance(task, va.TraceTask)
    return eval_trace(task, space, start_states)


def eval_vo(expr: va.VOExpr, space: StateSpace, start_states: frozenset | None = None) -> VOResult:
    """Evaluate an obligation expression tree; see the module docstring for
    the composition rules."""
    if va.is_task(expr):
        res = eval_task(expr, space, start_states)
        return VOResult(res.verdict, expr, task=res, carrier=res.carrier)
    if isinstance(expr, (va.AndExpr, va.OrExpr)):
        left = eval_vo(expr.left, space, start_states)
        right = eval_vo(expr.right, space, start_states)
        combine = and3 if isinstance(expr, va.AndExpr) else or3
        verdict = combine(left.verdict, right.verdict)
        carrier = None
        if verdict is Verdict.PASS:
            carrier = (left.carrier or frozenset()) | (right.carrier or frozenset())
        return VOResult(verdict, expr, children=(left, right), carrier=carrier)
    assert isinstance(expr, va.SeqExpr)
    left = eval_vo(expr.left, space, start_states)
    if left.verdict is not Verdict.PASS:
        return VOResult(left.verdict, expr, children=(left, None))
    carrier = left.carrier or frozenset()
    if not carrier:
        raise EngineError(
            "E-ENG-020",
            "right operand of ';' needs start states, but the left side passed on an empty carrier",
        )
    right = eval_vo(expr.right, space, carrier)
    return VOResult(right.verdict, expr, children=(left, right), carrier=right.carrier)
