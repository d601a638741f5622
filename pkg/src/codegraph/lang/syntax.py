"""ProgramAst node and type definitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

BASIC_TYPES = ("int", "float", "bool", "void")

# The closed set of node kinds a ProgramAst may contain.
NODE_KINDS = frozenset({
    # declarations
    "Program", "TypeDecl", "FieldDecl", "GlobalDecl", "FunctionDecl", "Param",
    # statements
    "Compound", "VarDecl", "Assign", "If", "While", "For", "Switch", "Case",
    "Default", "Return", "ExprStmt",
    # expressions
    "IntLit", "FloatLit", "BoolLit", "NullLit", "Name", "Index", "Field",
    "Unary", "Binary", "Call", "Cast", "NewArray",
})

EXPRESSION_KINDS = frozenset({
    "IntLit", "FloatLit", "BoolLit", "NullLit", "Name", "Index", "Field",
    "Unary", "Binary", "Call", "Cast", "NewArray",
})


@dataclass(frozen=True)
class Type:
    """A MiniLang type: a basic type or record name, optionally a 1-D array."""

    name: str
    array: bool = False

    @property
    def is_basic(self) -> bool:
        return self.name in BASIC_TYPES

    @property
    def is_record(self) -> bool:
        return not self.is_basic and self.name != "null"

    @property
    def element(self) -> Type:
        return Type(self.name)

    @property
    def numeric(self) -> bool:
        return not self.array and self.name in ("int", "float")

    def __str__(self) -> str:
        return self.name + ("[]" if self.array else "")


INT = Type("int")
FLOAT = Type("float")
BOOL = Type("bool")
VOID = Type("void")
NULL = Type("null")


@dataclass(eq=False)
class Node:
    """A ProgramAst node.

    ``value`` holds the payload that is not a child: an identifier, an
    operator symbol, literal text, or a case label. ``type`` is the
    declared type for declarations and the inferred type for expressions.
    ``scope`` is filled by name resolution for ``Name`` nodes
    (``local``, ``param`` or ``global``).
    """

    kind: str
    children: list[Node] = field(default_factory=list)
    value: str | None = None
    type: Type | None = None
    line: int = 0
    column: int = 0
    scope: str | None = None
    parent: Node | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")

    def walk(self) -> Iterator[Node]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def structure(self) -> tuple:
        """Position-free structural fingerprint, used for equality checks."""
        return (self.kind, self.value, str(self.type) if self.type else None,
                tuple(c.structure() for c in self.children))

    def link_parents(self) -> None:
        for node in self.walk():
            for child in node.children:
                child.parent = node

    @property
    def is_expression(self) -> bool:
        return self.kind in EXPRESSION_KINDS


# Accessors for the fixed child layouts produced by the parser.

def function_params(fn: Node) -> list[Node]:
    return [c for c in fn.children if c.kind == "Param"]


def function_body(fn: Node) -> Node | None:
    body = fn.children[-1] if fn.children else None
    return body if body is not None and body.kind == "Compound" else None
