"""Static typing of machines, contexts, and standalone predicates."""
from __future__ import annotations

import pytest

from vdd.errors import TypeCheckError
from vdd.specml.eval import build_env
from vdd.specml.parser import parse_context, parse_expression, parse_machine
from vdd.specml.typecheck import infer_type, typecheck, typecheck_contexts
from vdd.specml.values import BoolType, IntRangeType, MapType, SetType

CTX = parse_context("context c\n  set COLOR = {red, green, blue}\n  constant N = 3\nend\n")


def _machine(body: str):
    return parse_machine("machine M\n" + body)


def check(body: str, contexts=(CTX,)):
    return typecheck(_machine(body), contexts)


GOOD = """\
  sees c
  variables
    picked : set of COLOR
    count : 0..N
  invariants
    inv1 : card(picked) <= N
  events
    event INITIALISATION
      then
        picked := {}
        count := 0
      end
    event pick
      any col : COLOR
      when col /: picked
      then
        picked := picked \\/ {col}
        count := count + 1
      end
  end
"""


def test_good_machine_passes():
    tenv = check(GOOD)
    assert isinstance(tenv.variable_types["picked"], SetType)
    assert isinstance(tenv.variable_types["count"], IntRangeType)


def test_unknown_name_in_guard():
    bad = GOOD.replace("col /: picked", "col /: nothere")
    with pytest.raises(TypeCheckError) as exc:
        check(bad)
    assert exc.value.code == "E-TYPE-001"


def test_assignment_type_mismatch():
    bad = GOOD.replace("count := count + 1", "count := {}")
    with pytest.raises(TypeCheckError) as exc:
        check(bad)
    assert exc.value.code == "E-TYPE-002"


def test_guard_must_be_boolean():
    bad = GOOD.replace("when col /: picked", "when count + 1")
    with pytest.raises(TypeCheckError) as exc:
        check(bad)
    assert exc.value.code == "E-TYPE-002"


def test_invariant_must_be_boolean():
    bad = GOOD.replace("inv1 : card(picked) <= N", "inv1 : card(picked)")
    with pytest.raises(TypeCheckError) as exc:
        check(bad)
    assert exc.value.code == "E-TYPE-002"


def test_assignment_to_undeclared_variable():
    bad = GOOD.replace("count := 0", "ocunt := 0")
    with pytest.raises(TypeCheckError):
        check(bad)


def test_unknown_context():
    with pytest.raises(TypeCheckError) as exc:
        check(GOOD, contexts=())
    assert exc.value.code == "E-TYPE-001"


def test_unbounded_variable_type_rejected():
    with pytest.raises(TypeCheckError) as exc:
        check(
            "  variables\n    n : int\n  events\n"
            "    event INITIALISATION\n      then\n        n := 0\n      end\n  end\n"
        )
    assert exc.value.code == "E-TYPE-003"


def test_refinement_glue_checks_against_abstract():
    abstract = parse_machine(
        "machine A\n  variables\n    s : set of COLOR\n  events\n"
        "    event INITIALISATION\n      then\n        s := {}\n      end\n  end\nend\n"
    )
    concrete = parse_machine(
        "machine C\n  refines A\n  sees c\n  glue s = dom(f)\n  variables\n"
        "    f : partial map COLOR -> 0..2\n  events\n"
        "    event INITIALISATION\n      then\n        f := {}\n      end\n  end\nend\n"
    )
    typecheck(concrete, (CTX,), abstract=abstract)

    bad_glue = parse_machine(
        "machine C\n  refines A\n  sees c\n  glue s = card(f)\n  variables\n"
        "    f : partial map COLOR -> 0..2\n  events\n"
        "    event INITIALISATION\n      then\n        f := {}\n      end\n  end\nend\n"
    )
    with pytest.raises(TypeCheckError) as exc:
        typecheck(bad_glue, (CTX,), abstract=abstract)
    assert exc.value.code == "E-TYPE-002"


def test_glue_for_unknown_abstract_variable():
    abstract = parse_machine(
        "machine A\n  variables\n    s : bool\n  events\n"
        "    event INITIALISATION\n      then\n        s := true\n      end\n  end\nend\n"
    )
    bad = parse_machine(
        "machine C\n  refines A\n  glue nosuch = true\n  variables\n    t : bool\n  events\n"
        "    event INITIALISATION\n      then\n        t := true\n      end\n  end\nend\n"
    )
    with pytest.raises(TypeCheckError) as exc:
        typecheck(bad, (), abstract=abstract)
    assert exc.value.code == "E-TYPE-008"


def test_event_assigning_variable_twice():
    bad = GOOD.replace("count := count + 1", "count := count + 1\n        count := 0")
    with pytest.raises(TypeCheckError) as exc:
        check(bad)
    assert exc.value.code == "E-TYPE-007"


def test_machine_without_initialisation():
    with pytest.raises(TypeCheckError) as exc:
        check("  variables\n    x : bool\n  events\n    event e\n      then\n        x := true\n      end\n  end\n")
    assert exc.value.code == "E-TYPE-006"


# ---- infer_type on standalone expressions ---------------------------------


def _scope_env():
    env = build_env((CTX,))
    tenv = check(GOOD)
    return tenv.scope(), env


def test_infer_types_of_operators():
    scope, env = _scope_env()
    assert isinstance(infer_type(parse_expression("picked \\/ {red}"), scope, env), SetType)
    assert isinstance(infer_type(parse_expression("count < N"), scope, env), BoolType)
    assert isinstance(infer_type(parse_expression("{red |-> 1}"), scope, env), MapType)


def test_infer_rejects_mixed_set_union():
    scope, env = _scope_env()
    with pytest.raises(TypeCheckError):
        infer_type(parse_expression("picked \\/ {1}"), scope, env)


def test_prestate_requires_allow_pre():
    scope, env = _scope_env()
    with pytest.raises(TypeCheckError) as exc:
        infer_type(parse_expression("count > count$0"), scope, env)
    assert exc.value.code == "E-TYPE-005"
    assert isinstance(
        infer_type(parse_expression("count > count$0"), scope, env, allow_pre=True), BoolType
    )


def test_context_constants_typecheck():
    env = typecheck_contexts((CTX,))
    assert "N" in env.values


def test_context_constant_type_error():
    bad = parse_context("context c\n  constant K = 1 + true\nend\n")
    with pytest.raises(TypeCheckError):
        typecheck_contexts((bad,))
