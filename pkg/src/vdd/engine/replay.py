"""Independent re-checking of evaluator evidence.

Replay trusts nothing but the machine's transition relation and the naive
lasso evaluator: counterexample runs must be step-by-step legal and must
actually falsify the formula, witness states must be reachable the way the
trace claims and must satisfy the predicate, scenario failures must recur
when the scenario is re-run.  Each function returns a list of mismatch
descriptions; an empty list means the evidence held up.
"""
from __future__ import annotations

from vdd.specml.explore import StateSpace, Transition
from vdd.volang import ast as va

from .lasso import eval_on_lasso
from .results import (
    Lasso,
    StateEvidence,
    StepFailure,
    Verdict,
    VOResult,
    is_stutter,
    transition_text,
)
from .runs import AtomEvaluator, normalize


def valid_step(space: StateSpace, t: Transition) -> bool:
    """True iff `t` is a transition of the machine, counting the implicit
    stutter self-loop at deadlock states."""
    if t.src not in space.parents:
        return False
    if is_stutter(t):
        return t.dst == t.src and not space.successors(t.src)
    return t in space.successors(t.src)


def _chain_problems(space: StateSpace, edges, what: str) -> list[str]:
    problems = []
    for i, t in enumerate(edges):
        if not valid_step(space, t):
            problems.append(f"{what} edge {i + 1} is not a machine transition: {transition_text(space, t)}")
        if i + 1 < len(edges) and edges[i + 1].src != t.dst:
            problems.append(f"{what} edge {i + 2} does not start where edge {i + 1} ended")
    return problems


def _starts(space: StateSpace, start_states) -> list:
    if start_states is None:
        return list(space.initial)
    return [s for s in space.states if s in start_states]


def replay_lasso(
    space: StateSpace,
    formula: va.Formula,
    lasso: Lasso,
    start_states=None,
) -> list[str]:
    """Check that the lasso is a legal run from a designated start state and
    that the formula is false on it according to the naive evaluator."""
    if not lasso.cycle:
        return ["lasso has an empty cycle"]
    problems = []
    if lasso.start not in _starts(space, start_states):
        problems.append(f"lasso starts at ({space.fmt_state(lasso.start)}), which is not a start state")
    problems += _chain_problems(space, list(lasso.stem) + list(lasso.cycle), "lasso")
    if lasso.stem and lasso.cycle[0].src != lasso.stem[-1].dst:
        problems.append("cycle does not start where the stem ended")
    if lasso.cycle[-1].dst != lasso.cycle[0].src:
        problems.append("cycle does not loop back to its first state")
    if problems:
        return problems
    if eval_on_lasso(normalize(formula), AtomEvaluator(space), lasso.stem, lasso.cycle):
        problems.append("formula holds on the claimed counterexample run")
    return problems


def replay_state(
    space: StateSpace,
    pred,
    ev: StateEvidence,
    start_states=None,
    expect: bool = True,
) -> list[str]:
    """Check the access trace and that the predicate's truth at the state
    matches `expect` (true for witnesses, false for violations)."""
    from .tasks import _pred_holds

    problems = []
    if ev.state not in space.parents:
        return [f"state ({space.fmt_state(ev.state)}) is outside the machine's state space"]
    if ev.trace:
        problems += _chain_problems(space, ev.trace, "trace")
        if not problems and ev.trace[-1].dst != ev.state:
            problems.append("trace does not end at the evidence state")
        anchor = ev.trace[0].src
    else:
        anchor = ev.state
    # Violation traces always run from an initial state, even when the check
    # itself was carrier-scoped; witness traces run from the carrier.
    anchored = anchor in space.initial or (start_states is not None and anchor in start_states)
    if not anchored:
        problems.append(f"trace starts at ({space.fmt_state(anchor)}), which is not a start state")
    if problems:
        return problems
    if _pred_holds(space, pred, ev.state) != expect:
        want = "hold" if expect else "be false"
        problems.append(f"predicate was expected to {want} in ({space.fmt_state(ev.state)})")
    return problems


def _scenario_frontier(space: StateSpace, task: va.TraceTask, upto: int, start_states) -> list:
    """Frontier after the first `upto` scenario steps, following all matches."""
    from vdd.specml.eval import eval_expr

    frontier = _starts(space, start_states)
    for step in task.steps[:upto]:
        event = space.machine.event(step.event)
        wanted = None
        if step.args and event is not None:
            values = [eval_expr(a, space.env) for a in step.args]
            wanted = tuple((p.name, v) for p, v in zip(event.params, values))
        nxt: dict = {}
        for s in frontier:
            for t in space.successors(s):
                if t.event == step.event and (wanted is None or t.binding == wanted):
                    nxt[t.dst] = None
        frontier = list(nxt)
    return frontier


def replay_step_failure(
    space: StateSpace,
    task: va.TraceTask,
    ev: StepFailure,
    start_states=None,
) -> list[str]:
    """Re-run the scenario and confirm the claimed step really is disabled
    in the claimed state."""
    from vdd.specml.eval import eval_expr

    if not 1 <= ev.step <= len(task.steps):
        return [f"step {ev.step} is outside the scenario"]
    step = task.steps[ev.step - 1]
    if step.event != ev.event:
        return [f"step {ev.step} of the scenario is {step.event!r}, not {ev.event!r}"]
    frontier = _scenario_frontier(space, task, ev.step - 1, start_states)
    if ev.state not in frontier:
        return [f"state ({space.fmt_state(ev.state)}) is not reached after {ev.step - 1} step(s)"]
    event = space.machine.event(step.event)
    wanted = None
    if step.args and event is not None:
        values = [eval_expr(a, space.env) for a in step.args]
        wanted = tuple((p.name, v) for p, v in zip(event.params, values))
    for t in space.successors(ev.state):
        if t.event == step.event and (wanted is None or t.binding == wanted):
            return [f"step {ev.step} ({step.event}) is in fact enabled in ({space.fmt_state(ev.state)})"]
    return []


def _replay_leaf(space: StateSpace, node: VOResult, start_states) -> list[str]:
    task = node.expr
    res = node.task
    assert res is not None
    ev = res.evidence
    if isinstance(task, va.LtlTask):
        if isinstance(ev, Lasso):
            return replay_lasso(space, task.formula, ev, start_states)
        return []
    if isinstance(task, va.InvTask):
        if isinstance(ev, StateEvidence):
            return replay_state(space, task.pred, ev, start_states, expect=False)
        return []
    if isinstance(task, va.ExistsTask):
        if isinstance(ev, StateEvidence):
            return replay_state(space, task.pred, ev, start_states, expect=True)
        return []
    assert isinstance(task, va.TraceTask)
    if isinstance(ev, StepFailure):
        return replay_step_failure(space, task, ev, start_states)
    if isinstance(ev, StateEvidence) and task.final is not None:
        final_frontier = _scenario_frontier(space, task, len(task.steps), start_states)
        if ev.state not in final_frontier:
            return [f"state ({space.fmt_state(ev.state)}) is not a final state of the scenario"]
        # provenance is settled by the frontier check; anchor at the state itself
        return replay_state(
            space, task.final, StateEvidence(ev.state), frozenset({ev.state}), expect=False
        )
    return []


def replay_result(space: StateSpace, result: VOResult, start_states=None) -> list[str]:
    """Replay every piece of evidence in an obligation result tree.

    Sequencing is honoured: a right operand of ';' is replayed against the
    carrier its left operand passed on, exactly as it was evaluated.
    """
    if result.task is not None:
        return _replay_leaf(space, result, start_states)
    expr = result.expr
    problems: list[str] = []
    if isinstance(expr, va.SeqExpr):
        left, right = result.children
        problems += replay_result(space, left, start_states)
        if right is not None and left is not None:
            problems += replay_result(space, right, left.carrier)
        return problems
    for child in result.children:
        if child is not None:
            problems += replay_result(space, child, start_states)
    return problems
