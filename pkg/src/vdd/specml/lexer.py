"""Tokenizer shared by the machine, frame, and obligation languages.

Only expression-level words are reserved; structural words (`machine`,
`event`, `domain`, ...) are matched contextually by the parsers, so
identifiers stay free for formula names like G, F, X, U, BA.

Mathematical Unicode is accepted as an alias for the ASCII operators and is
normalized before tokenization.
"""
from __future__ import annotations

from dataclasses import dataclass

from vdd.errors import ParseError, SourceSpan

RESERVED = {"not", "or", "mod", "forall", "exists", "true", "false"}

# Longest match first.
_OPERATORS = [
    "<->",
    "|->",
    ":=",
    "..",
    "=>",
    "->",
    "/=",
    "/\\",
    "/:",
    "\\/",
    "<=",
    "<:",
    "<+",
    ">=",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ".",
    ";",
    ":",
    "=",
    "<",
    ">",
    "+",
    "-",
    "*",
    "/",
    "\\",
    "&",
    "@",
]

_UNICODE_ALIASES = {
    "∧": " & ",
    "∨": " or ",
    "¬": " not ",
    "⇒": " => ",
    "⟹": " => ",
    "≠": " /= ",
    "≤": " <= ",
    "≥": " >= ",
    "∈": " : ",
    "∉": " /: ",
    "⊆": " <: ",
    "∪": " \\/ ",
    "∩": " /\\ ",
    "↦": " |-> ",
    "∖": " \\ ",
    "∀": " forall ",
    "∃": " exists ",
    "·": " . ",
    "−": " - ",
    "×": " * ",
    "÷": " / ",
}


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "kw" | "int" | "op" | "newline" | "eof"
    text: str
    line: int
    col: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.col)


def _normalize(text: str) -> str:
    for uni, ascii_ in _UNICODE_ALIASES.items():
        if uni in text:
            text = text.replace(uni, ascii_)
    return text


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _normalize(raw)
        i, n = 0, len(line)
        while i < n:
            ch = line[i]
            if ch in " \t\r":
                i += 1
                continue
            if ch == "#":
                break
            col = i + 1
            if ch.isdigit():
                j = i
                while j < n and line[j].isdigit():
                    j += 1
                tokens.append(Token("int", line[i:j], lineno, col))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (line[j].isalnum() or line[j] == "_"):
                    j += 1
                word = line[i:j]
                if line[j : j + 2] == "$0":
                    tokens.append(Token("prename", word, lineno, col))
                    i = j + 2
                    continue
                kind = "kw" if word in RESERVED else "name"
                tokens.append(Token(kind, word, lineno, col))
                i = j
                continue
            for op in _OPERATORS:
                if line.startswith(op, i):
                    tokens.append(Token("op", op, lineno, col))
                    i += len(op)
                    break
            else:
                raise ParseError(
                    "E-PARSE-002",
                    f"unexpected character {ch!r}",
                    SourceSpan(file, lineno, col),
                )
        tokens.append(Token("newline", "\n", lineno, len(line) + 1))
    tokens.append(Token("eof", "", len(text.splitlines()) + 1, 1))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual accept/expect helpers."""

    def __init__(self, tokens: list[Token], file: str = "<string>"):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def span(self) -> SourceSpan:
        return self.peek().span(self.file)

    def check(self, kind: str | None = None, text: str | None = None) -> bool:
        tok = self.peek()
        if kind is not None and tok.kind != kind:
            return False
        if text is not None and tok.text != text:
            return False
        return True

    def accept(self, kind: str | None = None, text: str | None = None) -> Token | None:
        if self.check(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str | None = None, text: str | None = None, what: str | None = None) -> Token:
        if self.check(kind, text):
            return self.advance()
        tok = self.peek()
        wanted = what or text or kind or "token"
        found = repr(tok.text) if tok.text.strip() else tok.kind
        raise ParseError("E-PARSE-001", f"expected {wanted}, found {found}", tok.span(self.file))

    # Contextual structure words are plain names.
    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind in ("name", "kw") and tok.text in words

    def accept_word(self, *words: str) -> Token | None:
        if self.at_word(*words):
            return self.advance()
        return None

    def expect_word(self, word: str) -> Token:
        if self.at_word(word):
            return self.advance()
        tok = self.peek()
        found = repr(tok.text) if tok.text.strip() else tok.kind
        raise ParseError("E-PARSE-001", f"expected '{word}', found {found}", tok.span(self.file))

    def skip_newlines(self) -> None:
        while self.peek().kind == "newline":
            self.advance()

    def expect_newline(self) -> None:
        if self.peek().kind == "eof":
            return
        self.expect("newline", what="end of line")
        self.skip_newlines()

    def at_end(self) -> bool:
        return self.peek().kind == "eof"
