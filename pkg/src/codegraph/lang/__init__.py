"""MiniLang frontend: tokenizer, parser, name resolution, pretty-printer."""

from codegraph.lang.lexer import Token, TokenKind, tokenize
from codegraph.lang.parser import parse, parse_source
from codegraph.lang.printer import pretty_print
from codegraph.lang.syntax import Node, Type

__all__ = ["Node", "Token", "TokenKind", "Type", "parse", "parse_source", "pretty_print", "tokenize"]
