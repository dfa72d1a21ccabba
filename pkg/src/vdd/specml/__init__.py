"""Finite-state machine specification language: parsing, typing, evaluation,
and explicit-state exploration."""

from vdd.specml.ast import ContextSpec, MachineSpec
from vdd.specml.parser import parse_context, parse_machine, parse_expression
from vdd.specml.printer import print_context, print_machine, print_expression
from vdd.specml.typecheck import typecheck
from vdd.specml.explore import StateSpace, Transition, explore, check_invariants

__all__ = [
    "ContextSpec",
    "MachineSpec",
    "parse_context",
    "parse_machine",
    "parse_expression",
    "print_context",
    "print_machine",
    "print_expression",
    "typecheck",
    "StateSpace",
    "Transition",
    "explore",
    "check_invariants",
]
