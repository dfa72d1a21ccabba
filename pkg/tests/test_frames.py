"""Problem-diagram parsing, validation, degrees, and sub-frame substitution."""
from __future__ import annotations

import pytest

from vdd.errors import FrameError, ParseError
from vdd.frames import (
    DomainKind,
    Role,
    check_frames,
    domain_fragment,
    flatten,
    incoming_degree,
    machine_adjacent,
    parse_frame,
    print_frame,
    union_topology,
)

from conftest import CORPUS


def load_corpus_frames(project):
    frames = []
    for path in sorted((CORPUS / project / "frames").glob("*.frame")):
        frames.append(parse_frame(path.read_text(), str(path)))
    return frames


# ---- parsing ---------------------------------------------------------------

def test_parse_shapes():
    f = parse_frame(
        "frame lift\n"
        "  machine Lift\n"
        "  designed Floors @REQ0 @REQ9\n"
        "  given Buttons\n"
        "  interfaces\n"
        "    a: Lift <-> Floors\n"
        "    Buttons -> Lift\n"
        "end\n"
    )
    assert f.name == "lift"
    assert f.refines is None
    assert [d.kind for d in f.domains] == [DomainKind.MACHINE, DomainKind.DESIGNED, DomainKind.GIVEN]
    assert f.domain("Floors").requirements == ("REQ0", "REQ9")
    assert f.domain_names == ("Lift", "Floors", "Buttons")
    assert [d.name for d in f.machine_domains] == ["Lift"]
    named, unnamed = f.interfaces
    assert named.name == "a"
    assert all(ep.role == Role.BOTH for ep in named.endpoints)
    assert unnamed.name is None
    assert unnamed.role_of("Buttons") == Role.PRODUCER
    assert unnamed.role_of("Lift") == Role.CONSUMER
    assert unnamed.role_of("Floors") is None


def test_chain_splits_into_one_interface_per_arrow():
    f = parse_frame(
        "frame f\n  machine M\n  designed A\n  designed B\n"
        "  interfaces\n    M -> A -> B\n end\n"
    )
    first, second = f.interfaces
    assert first.touches("M") and first.touches("A") and not first.touches("B")
    assert second.role_of("A") == Role.PRODUCER
    assert second.role_of("B") == Role.CONSUMER


def test_named_chain_rejected():
    with pytest.raises(ParseError) as info:
        parse_frame(
            "frame f\n  machine M\n  designed A\n  designed B\n"
            "  interfaces\n    x: M -> A -> B\nend\n"
        )
    assert info.value.code == "E-PARSE-001"


def test_segment_lists_fan_out_to_endpoints():
    f = parse_frame(
        "frame f\n  machine M\n  designed A\n  designed B\n"
        "  interfaces\n    u: A, B -> M\nend\n"
    )
    (iface,) = f.interfaces
    assert iface.role_of("A") == iface.role_of("B") == Role.PRODUCER
    assert iface.role_of("M") == Role.CONSUMER


def test_parse_refines_header():
    f = parse_frame("frame detail refines D\n  designed Inner\nend\n")
    assert f.refines == "D"


def test_parse_garbage_line():
    with pytest.raises(ParseError) as info:
        parse_frame("frame f\n  widget W\nend\n")
    assert info.value.code == "E-PARSE-001"


def test_print_parse_round_trip_on_corpus():
    for project in ("lift", "aman"):
        for frame in load_corpus_frames(project):
            printed = print_frame(frame)
            again = parse_frame(printed)
            assert print_frame(again) == printed
            assert again.domain_names == frame.domain_names


# ---- validation ------------------------------------------------------------

MAIN = "frame top\n  machine M\n  designed D @REQ1\n  given G\n  interfaces\n    link: M -> D\n    G -> M\nend\n"


def check(*texts, known=None):
    return check_frames([parse_frame(t) for t in texts], known_requirements=known)


def test_check_accepts_corpus():
    for project in ("lift", "aman"):
        main, subs = check_frames(load_corpus_frames(project))
        assert main.refines is None
    assert set(subs) == {"Schedule", "User"}


def test_no_main_frame():
    with pytest.raises(FrameError) as info:
        check("frame a refines X\n  designed X\nend\n")
    assert info.value.code == "E-FRAME-001"


def test_two_main_frames():
    with pytest.raises(FrameError) as info:
        check(MAIN, MAIN.replace("frame top", "frame other"))
    assert info.value.code == "E-FRAME-001"


def test_main_needs_exactly_one_machine():
    with pytest.raises(FrameError) as info:
        check("frame f\n  designed D\nend\n")
    assert info.value.code == "E-FRAME-001"
    with pytest.raises(FrameError) as info:
        check("frame f\n  machine M\n  machine N\nend\n")
    assert info.value.code == "E-FRAME-001"


def test_sub_frame_may_not_declare_machine():
    with pytest.raises(FrameError) as info:
        check(MAIN, "frame d refines D\n  machine X\nend\n")
    assert info.value.code == "E-FRAME-001"


def test_sub_frame_target_must_exist_and_be_designed():
    with pytest.raises(FrameError) as info:
        check(MAIN, "frame d refines Missing\n  designed X\nend\n")
    assert info.value.code == "E-FRAME-002"
    with pytest.raises(FrameError) as info:
        check(MAIN, "frame d refines G\n  designed X\nend\n")
    assert info.value.code == "E-FRAME-002"


def test_domain_refined_twice():
    sub = "frame d refines D\n  designed D\n  designed X\nend\n"
    with pytest.raises(FrameError) as info:
        check(MAIN, sub, sub.replace("frame d", "frame e"))
    assert info.value.code == "E-FRAME-002"


def test_unknown_requirement_marker():
    check(MAIN, known=["REQ1"])
    with pytest.raises(FrameError) as info:
        check(MAIN, known=["REQ2"])
    assert info.value.code == "E-FRAME-003"


def test_interface_unknown_domain():
    with pytest.raises(FrameError) as info:
        check("frame f\n  machine M\n  interfaces\n    M -> Ghost\nend\n")
    assert info.value.code == "E-FRAME-004"


def test_duplicate_domain():
    with pytest.raises(FrameError) as info:
        check("frame f\n  machine M\n  designed M\nend\n")
    assert info.value.code == "E-FRAME-005"


def test_interface_needs_two_distinct_domains():
    with pytest.raises(FrameError) as info:
        check("frame f\n  machine M\n  interfaces\n    M -> M\nend\n")
    assert info.value.code == "E-FRAME-006"


# ---- degrees, adjacency, fragments -----------------------------------------

def test_incoming_degree_counts_consumer_interfaces():
    (lift,) = [f for f in load_corpus_frames("lift") if f.refines is None]
    assert incoming_degree(lift, "Floors") == 2  # from Lift (<->) and Doors (->)
    assert incoming_degree(lift, "Lift") == 3
    assert incoming_degree(lift, "Doors") == 1
    assert incoming_degree(lift, "Buttons") == 0


def test_machine_adjacent():
    main, _ = check_frames(load_corpus_frames("aman"))
    assert machine_adjacent(main) == {"Schedule", "User"}


def test_domain_fragment_tracks_decl_and_touching_interfaces():
    frame = parse_frame(MAIN)
    frag = domain_fragment(frame, "D")
    assert "designed D @REQ1" in frag
    assert "link: M -> D" in frag
    assert "G -> M" not in frag
    moved = parse_frame(MAIN.replace("@REQ1", "@REQ2"))
    assert domain_fragment(moved, "D") != frag
    assert domain_fragment(moved, "G") == domain_fragment(frame, "G")


# ---- substitution ----------------------------------------------------------

CARRIER_SUB = (
    "frame detail refines D\n"
    "  designed D\n"
    "  designed Inner\n"
    "  interfaces\n"
    "    D <-> Inner\n"
    "end\n"
)

NO_CARRIER_SUB = (
    "frame detail refines D\n"
    "  designed Inner\n"
    "  designed Outer\n"
    "  interfaces\n"
    "    link: Outer -> Inner\n"
    "    Inner -> Outer\n"
    "end\n"
)


def test_flatten_with_carrier_keeps_interfaces():
    main, subs = check(MAIN, CARRIER_SUB)
    flat = flatten(main, subs)
    assert set(flat.domain_names) == {"M", "D", "G", "Inner"}
    assert len(flat.interfaces) == 3
    # first-declared kind and markers win the merge
    assert flat.domain("D").requirements == ("REQ1",)


def test_flatten_without_carrier_reroutes_by_name():
    main, subs = check(MAIN, NO_CARRIER_SUB)
    flat = flatten(main, subs)
    assert set(flat.domain_names) == {"M", "G", "Inner", "Outer"}
    merged = next(i for i in flat.interfaces if i.name == "link")
    assert merged.role_of("M") == Role.PRODUCER
    assert merged.role_of("Inner") == Role.CONSUMER
    assert not merged.touches("D")
    # the sub's matched interface is consumed, its other one survives
    assert len(flat.interfaces) == 3


def test_flatten_without_carrier_or_name_match_fails():
    main, subs = check(MAIN, NO_CARRIER_SUB.replace("link: ", ""))
    with pytest.raises(FrameError) as info:
        flatten(main, subs)
    assert info.value.code == "E-FRAME-010"
    # partial expansion that skips the bad target still works
    assert flatten(main, subs, expand=[]).domain_names == main.domain_names


def test_flatten_kind_conflict():
    main, subs = check(MAIN, CARRIER_SUB.replace("designed D", "given D"))
    with pytest.raises(FrameError) as info:
        flatten(main, subs)
    assert info.value.code == "E-FRAME-005"


def test_union_topology_is_total():
    main, subs = check(MAIN, NO_CARRIER_SUB.replace("link: ", ""))
    union = union_topology(main, subs)  # no E-FRAME-010 here
    assert set(union.domain_names) == {"M", "D", "G", "Inner", "Outer"}
    assert len(union.interfaces) == 4


def test_flatten_corpus_aman():
    main, subs = check_frames(load_corpus_frames("aman"))
    flat = flatten(main, subs)
    assert set(flat.domain_names) == {
        "AMAN", "Schedule", "User", "Display",
        "Aircraft", "Time", "Zoom", "HoldUnhold", "Move",
    }
    assert len(flat.interfaces) == 6
