"""Explicit-state checking of validation obligations."""
from .lasso import eval_on_lasso
from .ltl import eval_ltl
from .oracle import coverage_bound, find_violating_lasso, oracle_ltl
from .replay import (
    replay_lasso,
    replay_result,
    replay_state,
    replay_step_failure,
    valid_step,
)
from .results import (
    STUTTER,
    Evidence,
    Lasso,
    StateEvidence,
    StepFailure,
    Verdict,
    VOResult,
    VTResult,
    and3,
    evidence_json,
    evidence_text,
    is_stutter,
    or3,
    transition_text,
)
from .runs import AtomEvaluator, atoms_of, build_edges, normalize, reachable_from
from .tasks import eval_exists, eval_inv, eval_task, eval_trace, eval_vo

__all__ = [
    "AtomEvaluator",
    "Evidence",
    "Lasso",
    "STUTTER",
    "StateEvidence",
    "StepFailure",
    "VOResult",
    "VTResult",
    "Verdict",
    "and3",
    "atoms_of",
    "build_edges",
    "coverage_bound",
    "eval_exists",
    "eval_inv",
    "eval_ltl",
    "eval_on_lasso",
    "eval_task",
    "eval_trace",
    "eval_vo",
    "evidence_json",
    "evidence_text",
    "find_violating_lasso",
    "is_stutter",
    "normalize",
    "or3",
    "oracle_ltl",
    "replay_lasso",
    "replay_result",
    "replay_state",
    "replay_step_failure",
    "transition_text",
    "valid_step",
]
