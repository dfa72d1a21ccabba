"""Set-theoretic expression evaluation.

Expected values are computed with ordinary Python sets/dicts next to each
assertion, so the evaluator is checked against an independent formulation
rather than against itself.
"""
from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vdd.errors import EvalError
from vdd.specml.eval import Env, build_env, eval_expr, values_equal
from vdd.specml.parser import parse_context, parse_expression
from vdd.specml.values import FMap, fmt_value

CTX = parse_context("context c\n  set COLOR = {red, green, blue}\n  constant N = 3\nend\n")


def ev(text: str, **bindings):
    env = build_env((CTX,)).child(bindings)
    return eval_expr(parse_expression(text), env)


# ---- scalars ---------------------------------------------------------------


def test_arithmetic():
    assert ev("2 + 3 * 4") == 2 + 3 * 4
    assert ev("7 mod 3") == 7 % 3
    assert ev("7 / 2") == 7 // 2
    assert ev("-(2 + 1)") == -3


def test_comparisons_and_logic():
    assert ev("1 < 2 & 2 <= 2") is True
    assert ev("1 = 2 or not (3 /= 3)") is True
    assert ev("false => true") is True
    assert ev("true => false") is False


def test_division_by_zero_is_eval_error():
    with pytest.raises(EvalError) as exc:
        ev("1 / 0")
    assert exc.value.code == "E-EVAL-001"
    with pytest.raises(EvalError):
        ev("1 mod 0")


# ---- sets ------------------------------------------------------------------


def test_set_operations_match_python_sets():
    a, b = {1, 2, 3}, {3, 4}
    assert ev("{1, 2, 3} \\/ {3, 4}") == frozenset(a | b)
    assert ev("{1, 2, 3} /\\ {3, 4}") == frozenset(a & b)
    assert ev("{1, 2, 3} \\ {3, 4}") == frozenset(a - b)
    assert ev("card({1, 2, 3} \\/ {3, 4})") == len(a | b)


def test_membership_and_subset():
    assert ev("2 : {1, 2}") is True
    assert ev("5 /: {1, 2}") is True
    assert ev("{1} <: {1, 2}") is True
    assert ev("{1, 9} <: {1, 2}") is False


def test_range_expands_to_a_set():
    assert ev("2..5") == frozenset({2, 3, 4, 5})
    assert ev("card(0..N)") == 4  # N = 3 from the context
    assert ev("5..2") == frozenset()


def test_carrier_set_elements():
    assert ev("red : COLOR") is True
    assert ev("card(COLOR)") == 3


# ---- maps ------------------------------------------------------------------


def test_map_literal_and_application():
    f = FMap([(1, 10), (2, 20)])
    assert ev("f(2)", f=f) == 20  # application goes through a bound name
    d = {1: 10, 2: 20}
    assert set(ev("dom({1 |-> 10, 2 |-> 20})")) == set(d.keys())
    assert set(ev("ran({1 |-> 10, 2 |-> 20})")) == set(d.values())


def test_map_override_matches_dict_update():
    base, patch = {1: 10, 2: 20}, {2: 99, 3: 30}
    merged = dict(base)
    merged.update(patch)
    result = ev("{1 |-> 10, 2 |-> 20} <+ {2 |-> 99, 3 |-> 30}")
    assert isinstance(result, FMap)
    assert dict(result.items()) == merged


def test_map_application_outside_domain():
    with pytest.raises(EvalError) as exc:
        ev("f(2)", f=FMap([(1, 10)]))
    assert exc.value.code == "E-EVAL-002"


def test_map_membership_uses_maplets():
    assert ev("1 |-> 10 : {1 |-> 10, 2 |-> 20}") is True
    assert ev("1 |-> 99 : {1 |-> 10}") is False


def test_empty_set_and_empty_map_are_interchangeable():
    assert ev("card({})") == 0
    assert values_equal(ev("{}"), FMap())
    assert ev("{} <+ {1 |-> 2}") == FMap([(1, 2)])
    assert ev("dom({})") == frozenset()


def test_dist_absolute_difference():
    assert ev("DIST(3 |-> 7)") == 4
    assert ev("DIST(7 |-> 3)") == 4
    assert ev("DIST(5 |-> 5)") == 0


# ---- quantifiers -----------------------------------------------------------


def test_forall_over_membership_bound():
    assert ev("forall x . x : {2, 4, 6} => x mod 2 = 0") is True
    assert ev("forall x . x : {2, 5} => x mod 2 = 0") is False


def test_exists_with_typed_variable():
    assert ev("exists n : 0..9 . n * n = 49") is True
    assert ev("exists n : 0..9 . n * n = 50") is False


def test_two_variable_quantifier():
    # all distinct pairs from a 3-element set: 3*2 = 6 combinations checked
    assert ev("forall p, q . p : COLOR & q : COLOR & p /= q => not p = q") is True


def test_quantifier_without_derivable_range():
    with pytest.raises(EvalError) as exc:
        ev("forall x . x > 0")
    assert exc.value.code == "E-EVAL-006"


def test_unknown_name():
    with pytest.raises(EvalError) as exc:
        ev("nosuch + 1")
    assert exc.value.code == "E-EVAL-003"


# ---- rendering -------------------------------------------------------------


def test_fmt_value_is_deterministic():
    v = ev("{3, 1, 2}")
    assert fmt_value(v) == "{1, 2, 3}"
    m = ev("{2 |-> 20, 1 |-> 10}")
    assert fmt_value(m) == "{1 |-> 10, 2 |-> 20}"
    assert fmt_value(ev("red")) == "red"
    assert fmt_value(True) == "true"


@given(st.sets(st.integers(min_value=0, max_value=20), max_size=6),
       st.sets(st.integers(min_value=0, max_value=20), max_size=6))
def test_union_intersection_difference_properties(xs, ys):
    sx = "{" + ", ".join(map(str, sorted(xs))) + "}"
    sy = "{" + ", ".join(map(str, sorted(ys))) + "}"
    assert ev(f"{sx} \\/ {sy}") == frozenset(xs | ys)
    assert ev(f"{sx} /\\ {sy}") == frozenset(xs & ys)
    assert ev(f"{sx} \\ {sy}") == frozenset(xs - ys)
    assert ev(f"card({sx})") == len(xs)
