"""The obligation language: requirements, VO expressions, temporal formulas."""
from vdd.volang.ast import (
    AndExpr,
    BaAtom,
    ExistsTask,
    Formula,
    InvTask,
    LtlTask,
    OrExpr,
    Requirement,
    SeqExpr,
    StateAtom,
    TraceStep,
    TraceTask,
    VODecl,
    VOExpr,
    VOId,
    is_task,
    tasks,
)
from vdd.volang.parser import parse_requirements, parse_vo, parse_vo_file
from vdd.volang.printer import (
    print_decl,
    print_formula,
    print_requirements,
    print_vo,
    print_vo_expr,
)
from vdd.volang.resolve import resolve, task_scopes

__all__ = [
    "AndExpr",
    "BaAtom",
    "ExistsTask",
    "Formula",
    "InvTask",
    "LtlTask",
    "OrExpr",
    "Requirement",
    "SeqExpr",
    "StateAtom",
    "TraceStep",
    "TraceTask",
    "VODecl",
    "VOExpr",
    "VOId",
    "is_task",
    "tasks",
    "parse_requirements",
    "parse_vo",
    "parse_vo_file",
    "print_decl",
    "print_formula",
    "print_requirements",
    "print_vo",
    "print_vo_expr",
    "resolve",
    "task_scopes",
]
