"""Canonical printing: parse(print(x)) must reproduce x structurally.

The printed form doubles as the hashing surface for change detection, so
these tests also pin the exact text of a couple of fixtures.
"""
from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from vdd.specml import ast
from vdd.specml.parser import parse_context, parse_expression, parse_machine
from vdd.specml.printer import print_context, print_expression, print_machine

# ---- random expression trees ----------------------------------------------

_names = st.sampled_from(["x", "y", "zz", "floor", "S"])


def _exprs() -> st.SearchStrategy[ast.Expr]:
    leaves = st.one_of(
        st.integers(min_value=0, max_value=99).map(ast.IntLit),
        st.booleans().map(ast.BoolLit),
        _names.map(ast.Name),
    )

    def extend(children):
        binary = st.sampled_from(
            ["&", "or", "=>", "=", "/=", "<", "<=", ":", "/:", "<:", "\\/", "/\\", "\\", "<+", "+", "-", "*", "/", "mod", ".."]
        )
        return st.one_of(
            st.tuples(binary, children, children).map(lambda t: ast.Binary(t[0], t[1], t[2])),
            st.tuples(children, children).map(lambda t: ast.Maplet(t[0], t[1])),
            children.map(lambda c: ast.Unary("not", c)),
            children.map(lambda c: ast.Unary("-", c)),
            st.lists(children, max_size=3).map(lambda cs: ast.SetLit(tuple(cs))),
            st.tuples(_names, st.lists(children, min_size=1, max_size=2)).map(
                lambda t: ast.Call(t[0], tuple(t[1]))
            ),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(_exprs())
@settings(max_examples=300, deadline=None)
def test_expression_round_trip(e):
    assert parse_expression(print_expression(e)) == e


@given(_exprs())
@settings(max_examples=100, deadline=None)
def test_printing_is_stable(e):
    once = print_expression(e)
    assert print_expression(parse_expression(once)) == once


def test_quantifier_round_trip():
    for text in (
        "forall x . x : S",
        "exists p : 0..5, q . p = q",
        "forall p, q . p : dom(f) & q : dom(f) => DIST(f(p) |-> f(q)) >= 3",
    ):
        e = parse_expression(text)
        assert parse_expression(print_expression(e)) == e


def test_minimal_parentheses():
    assert print_expression(parse_expression("(a & b) => c")) == "a & b => c"
    assert print_expression(parse_expression("a & (b => c)")) == "a & (b => c)"
    assert print_expression(parse_expression("(x + y) * z")) == "(x + y) * z"
    assert print_expression(parse_expression("x + (y * z)")) == "x + y * z"


# ---- machines and contexts ------------------------------------------------

M1 = """\
machine M1
  refines M0
  sees aircraft, timing
  implements Time
  glue scheduledAirplanes = dom(landing_sequence)
  variables
    landing_sequence : partial map AIRPLANE -> 0..MAXTIME
  invariants
    inv1 : forall p, q . p : dom(landing_sequence) & q : dom(landing_sequence) & p /= q => DIST(landing_sequence(p) |-> landing_sequence(q)) >= AIRCRAFT_SEPARATION_MIN
  events
    event INITIALISATION
      then
        landing_sequence := {}
      end
    event addAirplane
      any ap : AIRPLANE, t : 0..MAXTIME
      when ap /: dom(landing_sequence)
      then
        landing_sequence := landing_sequence <+ {ap |-> t}
      end
  end
end
"""


def test_machine_round_trip():
    m = parse_machine(M1, "m1.mch")
    printed = print_machine(m)
    assert parse_machine(printed) == m


def test_machine_print_is_canonical():
    m = parse_machine(M1)
    assert print_machine(parse_machine(print_machine(m))) == print_machine(m)


def test_comments_do_not_change_canonical_text(lift_dir):
    raw = (lift_dir / "machines" / "m0.mch").read_text()
    without = print_machine(parse_machine(raw))
    with_comment = print_machine(parse_machine("# edited\n" + raw + "\n# trailing\n"))
    assert without == with_comment


def test_context_round_trip():
    c = parse_context("context timing\n  set AIRPLANE = {a, b, c}\n  constant MAXTIME = 9\nend\n")
    assert parse_context(print_context(c)) == c
