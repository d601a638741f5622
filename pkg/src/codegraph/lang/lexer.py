"""Tokenizer for MiniLang source text."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from codegraph.errors import LexError


class TokenKind(str, Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    INTEGER = "integer-literal"
    FLOAT = "float-literal"
    OPERATOR = "operator"
    PUNCT = "punctuation"
    EOF = "eof"


KEYWORDS = frozenset({
    "int", "float", "bool", "void", "type",
    "if", "else", "while", "for", "switch", "case", "default", "return",
    "true", "false", "null",
})

# longest match first
OPERATORS = ("&&", "||", "<=", ">=", "==", "!=",
             "+", "-", "*", "/", "%", "<", ">", "!", "=")
PUNCTUATION = ("(", ")", "{", "}", "[", "]", ";", ",", ".", ":")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<float>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||<=|>=|==|!=|[-+*/%<>!=])
  | (?P<punct>[(){}\[\];,.:])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    def is_(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"Token({self.kind.value} {self.text!r} @{self.line}:{self.column})"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, dropping whitespace and comments.

    Raises LexError at the first character that cannot start a token,
    including an unterminated block comment.
    """
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if m is None:
            if source.startswith("/*", pos):
                raise LexError("unterminated block comment", line, column)
            raise LexError(f"illegal character {source[pos]!r}", line, column)
        kind = m.lastgroup
        text = m.group()
        if kind == "float":
            tokens.append(Token(TokenKind.FLOAT, text, line, column))
        elif kind == "int":
            tokens.append(Token(TokenKind.INTEGER, text, line, column))
        elif kind == "ident":
            tk = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(tk, text, line, column))
        elif kind == "op":
            tokens.append(Token(TokenKind.OPERATOR, text, line, column))
        elif kind == "punct":
            tokens.append(Token(TokenKind.PUNCT, text, line, column))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    return tokens
