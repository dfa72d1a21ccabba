"""Tokenizer: operators, unicode aliasing, comments, reserved words."""
from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vdd.errors import ParseError
from vdd.specml.lexer import TokenStream, tokenize


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text) if t.kind not in ("newline", "eof")]


def test_simple_line():
    assert kinds("x := y + 1") == [
        ("name", "x"),
        ("op", ":="),
        ("name", "y"),
        ("op", "+"),
        ("int", "1"),
    ]


def test_longest_match_operators():
    # '<->' must not lex as '<' '-' '>', '|->' not as '|' '->', etc.
    assert [k for k, _ in kinds("a <-> b")] == ["name", "op", "name"]
    assert kinds("a |-> b")[1] == ("op", "|->")
    assert kinds("0..9")[1] == ("op", "..")
    assert kinds("s \\/ t")[1] == ("op", "\\/")
    assert kinds("f <+ g")[1] == ("op", "<+")


def test_comment_runs_to_end_of_line():
    assert kinds("x # y + z") == [("name", "x")]
    assert kinds("# whole line") == []


def test_newlines_are_tokens():
    toks = tokenize("a\nb\n")
    assert [t.kind for t in toks] == ["name", "newline", "name", "newline", "eof"]


def test_every_line_ends_in_a_newline_token():
    toks = tokenize("a\n\n\nb")
    assert [t.kind for t in toks] == ["name", "newline", "newline", "newline", "name", "newline", "eof"]


def test_reserved_words_are_keywords():
    for word in ("not", "or", "mod", "forall", "exists", "true", "false"):
        assert kinds(word) == [("kw", word)]
    # Structural words are plain names at the lexer level.
    for word in ("machine", "event", "when", "then", "G", "F", "BA"):
        assert kinds(word) == [("name", word)]


def test_prestate_names():
    assert kinds("x$0") == [("prename", "x")]
    with pytest.raises(ParseError):  # a detached '$' is not a token
        tokenize("x $0")


def test_unicode_aliases():
    assert kinds("a ∧ b") == kinds("a & b")
    assert kinds("x ∈ S") == kinds("x : S")
    assert kinds("a ↦ b") == kinds("a |-> b")
    assert kinds("s ∪ t") == kinds("s \\/ t")
    assert kinds("∀ x · x ≤ y") == kinds("forall x . x <= y")


def test_unknown_character_raises():
    with pytest.raises(ParseError) as exc:
        tokenize("a ? b")
    assert exc.value.code == "E-PARSE-002"


def test_spans_point_into_the_line():
    toks = tokenize("  foo", "f.mch")
    assert toks[0].line == 1
    assert toks[0].col == 3
    assert toks[0].span("f.mch").file == "f.mch"


def test_token_stream_navigation():
    ts = TokenStream(tokenize("a, b"), "<t>")
    assert ts.peek().text == "a"
    assert ts.accept("op", ",") is None or True  # not at a comma yet
    ts.advance()
    assert ts.accept("op", ",")
    assert ts.expect("name", what="name").text == "b"


@given(st.integers(min_value=0, max_value=10**9))
def test_integers_round_trip(n):
    toks = kinds(str(n))
    assert toks == [("int", str(n))]


@given(st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,10}", fullmatch=True))
def test_identifiers_lex_whole(name):
    toks = kinds(name)
    assert len(toks) == 1
    kind, text = toks[0]
    assert text == name
    assert kind in ("name", "kw")
