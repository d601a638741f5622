"""Per-block augmented ASTs.

Each basic block is described by a tree whose root is a synthetic ``Block``
node and whose children are the AST subtrees its instructions came from.
The subtrees are rewritten on the way:

* variable uses get their type attached as the last child: one leaf for a
  basic type, one leaf per CamelCase segment for a record type, wrapped in
  ``ArrayOf`` for arrays;
* casts carry a ``FromType`` and a ``ToType`` subtree;
* numeric constants are split into one leaf per decimal character;
* identifiers are split into subtokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from codegraph.errors import GraphError
from codegraph.ir.cfg import BasicBlock
from codegraph.ir.tac import TacKind
from codegraph.lang.syntax import Node, Type

SIGN = "<sign>"
POINT = "<point>"

_SEGMENT = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z0-9]+|[A-Z]+|[0-9]+")


def split_camel(identifier: str) -> list[str]:
    """Split an identifier at underscores, lower->upper transitions and
    acronym boundaries, keeping the original casing.

    >>> split_camel("HTTPServer")
    ['HTTP', 'Server']
    """
    parts = [seg for chunk in identifier.split("_") if chunk for seg in _SEGMENT.findall(chunk)]
    return parts or [identifier]


def canonical_number(text: str) -> str:
    if re.fullmatch(r"-?\d+", text):
        return str(int(text))
    return np.format_float_positional(float(text), trim="0")


def decompose_constant(literal: str) -> list[str]:
    """One leaf label per character of the canonical decimal rendering."""
    out = []
    for ch in canonical_number(literal):
        out.append(SIGN if ch == "-" else POINT if ch == "." else ch)
    return out


@dataclass
class AstNode:
    label: str
    children: list[AstNode] = field(default_factory=list)
    augmented: bool = field(default=True, compare=False, repr=False)

    def walk(self) -> Iterator[AstNode]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def labels(self) -> list[str]:
        return [n.label for n in self.walk()]

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def depth(self) -> int:
        best = 0
        stack = [(self, 1)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in node.children)
        return best

    def to_json(self) -> dict:
        return {"label": self.label, "children": [c.to_json() for c in self.children]}

    @classmethod
    def from_json(cls, obj) -> AstNode:
        return cls(obj["label"], [cls.from_json(c) for c in obj["children"]])


@dataclass
class BlockAst:
    root: AstNode
    block: int


def _leaf(label: str) -> AstNode:
    return AstNode(label)


def type_subtree(ty: Type) -> list[AstNode]:
    if ty.array:
        return [AstNode("ArrayOf", type_subtree(ty.element))]
    if ty.is_basic or ty.name == "null":
        return [_leaf(ty.name)]
    return [_leaf(seg) for seg in split_camel(ty.name)]


def _names(identifier: str) -> list[AstNode]:
    return [_leaf(seg) for seg in split_camel(identifier)]


def augment_node(node: Node) -> AstNode:
    """Convert a resolved ProgramAst subtree into its augmented form."""
    if isinstance(node, AstNode):
        raise GraphError("tree is already augmented")
    kind = node.kind
    if kind in ("IntLit", "FloatLit"):
        return AstNode("Const", [_leaf(c) for c in decompose_constant(node.value)])
    if kind == "BoolLit":
        return AstNode("Const", [_leaf(node.value)])
    if kind == "NullLit":
        return _leaf("NULL")
    if kind == "Name":
        label = "StaticFieldRef" if node.scope == "global" else "Local"
        return AstNode(label, _names(node.value) + type_subtree(node.type))
    if kind == "Index":
        return AstNode("ArrayRef", [augment_node(c) for c in node.children])
    if kind == "Field":
        return AstNode("FieldRef", [augment_node(node.children[0])] + _names(node.value) + type_subtree(node.type))
    if kind == "Unary":
        return AstNode("UOp", [_leaf(node.value), augment_node(node.children[0])])
    if kind == "Binary":
        left, right = node.children
        return AstNode("BOp", [augment_node(left), _leaf(node.value), augment_node(right)])
    if kind == "Call":
        return AstNode("Invoke", [AstNode("Method", _names(node.value))] + [augment_node(a) for a in node.children])
    if kind == "Cast":
        operand = node.children[0]
        return AstNode("Cast", [
            AstNode("FromType", type_subtree(operand.type)),
            AstNode("ToType", type_subtree(node.type)),
            augment_node(operand),
        ])
    if kind == "NewArray":
        return AstNode("NewArray", type_subtree(node.type.element) + [augment_node(node.children[0])])
    if kind == "VarDecl":
        target = AstNode("Local", _names(node.value) + type_subtree(node.type))
        if node.children:
            return AstNode("DefStmt", [target, augment_node(node.children[0])])
        return AstNode("DeclStmt", [target])
    if kind == "Assign":
        return AstNode("DefStmt", [augment_node(c) for c in node.children])
    if kind == "ExprStmt":
        return AstNode("ExprStmt", [augment_node(node.children[0])])
    if kind == "Return":
        return AstNode("ReturnOp", [augment_node(c) for c in node.children])
    raise GraphError(f"no block-level rendering for {kind} nodes")


def _instr_tree(instr) -> AstNode | None:
    if instr.kind == TacKind.JUMP:
        return None
    if instr.kind == TacKind.MARKER:
        return _leaf("FunctionDecl" if instr.operands[0] == "entry" else "FunctionExit")
    if instr.kind == TacKind.SWITCH:
        return AstNode("Switch", [augment_node(instr.ast)])
    return augment_node(instr.ast)


def augment_block_ast(block: BasicBlock) -> BlockAst:
    """Build the augmented tree of one basic block.

    When one instruction's backing subtree lies inside another's (a hoisted
    call inside an assignment, a short-circuit operand reused by its
    branch), only the enclosing subtree is kept.
    """
    backing = {id(i.ast) for i in block.instrs if i.kind not in (TacKind.JUMP, TacKind.MARKER)}
    children: list[AstNode] = []
    emitted: set[int] = set()
    for instr in block.instrs:
        if instr.kind not in (TacKind.JUMP, TacKind.MARKER):
            node = instr.ast
            if id(node) in emitted:
                continue
            anc = node.parent
            nested = False
            while anc is not None:
                if id(anc) in backing:
                    nested = True
                    break
                anc = anc.parent
            if nested:
                continue
            emitted.add(id(node))
        tree = _instr_tree(instr)
        if tree is not None:
            children.append(tree)
    return BlockAst(AstNode("Block", children), block.id)
