"""Tokenizer for `.flash` scripts."""

from __future__ import annotations

import re
from dataclasses import dataclass


class DslError(Exception):
    """Frontend error anchored at a 1-based (line, column) position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class LexError(DslError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, PROP, INT, FLOAT, STRING, EOF or the punctuation text itself
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return "end of input" if self.kind == "EOF" else repr(self.text)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<FLOAT>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<INT>\d+)
  | (?P<PROP>@[A-Za-z_][A-Za-z0-9_]*)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>==|!=|<=|>=|&&|\|\||[()\[\]{},;.|=<>!+\-*/%])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            if text[pos] == '"':
                raise LexError("unterminated string literal", line, col)
            raise LexError(f"illegal character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(lexeme if kind == "punct" else kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + lexeme.rindex("\n") + 1
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("EOF", "", line, col))
    return tokens


def unquote(lexeme: str) -> str:
    body = lexeme[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'
