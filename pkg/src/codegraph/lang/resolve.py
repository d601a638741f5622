"""Name resolution and type annotation for ProgramAst trees."""

from __future__ import annotations

from dataclasses import dataclass, field

from codegraph.errors import ResolveError
from codegraph.lang.syntax import BOOL, FLOAT, INT, NULL, VOID, Node, Type, function_body, function_params

ARITHMETIC = {"+", "-", "*", "/", "%"}
COMPARISON = {"<", "<=", ">", ">=", "==", "!="}
LOGICAL = {"&&", "||"}


@dataclass
class Signature:
    name: str
    returns: Type
    params: list[Type]
    defined: bool
    node: Node


@dataclass
class Env:
    records: dict[str, dict[str, Type]] = field(default_factory=dict)
    functions: dict[str, Signature] = field(default_factory=dict)
    globals: dict[str, Type] = field(default_factory=dict)


def _err(node: Node, message: str) -> ResolveError:
    return ResolveError(message, node.line, node.column)


class Resolver:
    def __init__(self, program: Node):
        self.program = program
        self.env = Env()
        self.scopes: list[dict[str, tuple[Type, str]]] = []
        self.current: Signature | None = None

    def run(self) -> Env:
        env = self.env
        for item in self.program.children:
            if item.kind == "TypeDecl":
                if item.value in env.records:
                    raise _err(item, f"duplicate declaration of type {item.value!r}")
                fields: dict[str, Type] = {}
                for f in item.children:
                    if f.value in fields:
                        raise _err(f, f"duplicate field {f.value!r} in {item.value!r}")
                    fields[f.value] = f.type
                env.records[item.value] = fields
        for fields in env.records.values():
            for ty in fields.values():
                self.check_type(self.program, ty)
        for item in self.program.children:
            if item.kind == "FunctionDecl":
                self.check_type(item, item.type, allow_void=True)
                params = function_params(item)
                for p in params:
                    self.check_type(p, p.type)
                sig = Signature(item.value, item.type, [p.type for p in params],
                                function_body(item) is not None, item)
                prev = env.functions.get(item.value)
                if prev is not None:
                    if prev.defined and sig.defined:
                        raise _err(item, f"duplicate definition of function {item.value!r}")
                    if prev.returns != sig.returns or prev.params != sig.params:
                        raise _err(item, f"conflicting declarations of function {item.value!r}")
                    if sig.defined:
                        env.functions[item.value] = sig
                else:
                    env.functions[item.value] = sig
        for item in self.program.children:
            if item.kind == "GlobalDecl":
                self.check_type(item, item.type)
                if item.value in env.globals or item.value in env.functions:
                    raise _err(item, f"duplicate declaration of {item.value!r}")
                if item.children:
                    self.scopes = [{}]
                    self.assignable(item.type, self.expr(item.children[0]), item.children[0])
                env.globals[item.value] = item.type
        for item in self.program.children:
            if item.kind == "FunctionDecl" and function_body(item) is not None:
                self.function(item)
        return env

    # -- helpers -------------------------------------------------------

    def check_type(self, node: Node, ty: Type, allow_void: bool = False) -> None:
        if ty.name == "void" and not (allow_void and not ty.array):
            raise _err(node, "void is only valid as a return type")
        if not ty.is_basic and ty.name not in self.env.records:
            raise _err(node, f"unknown type {ty.name!r}")

    def declare(self, node: Node, name: str, ty: Type, scope: str) -> None:
        for frame in self.scopes:
            if name in frame:
                raise _err(node, f"duplicate declaration of {name!r}")
        if name in self.env.globals or name in self.env.functions:
            raise _err(node, f"duplicate declaration of {name!r}")
        self.scopes[-1][name] = (ty, scope)

    def lookup(self, node: Node) -> tuple[Type, str]:
        for frame in reversed(self.scopes):
            if node.value in frame:
                return frame[node.value]
        if node.value in self.env.globals:
            return self.env.globals[node.value], "global"
        if node.value in self.env.functions:
            raise _err(node, f"function {node.value!r} used as a value")
        raise _err(node, f"undeclared identifier {node.value!r}")

    def assignable(self, target: Type, source: Type, node: Node) -> None:
        if target == source:
            return
        if source == NULL and (target.array or target.is_record):
            return
        if target == FLOAT and source == INT:
            return
        raise _err(node, f"cannot assign {source} to {target}")

    # -- statements ----------------------------------------------------

    def function(self, fn: Node) -> None:
        self.current = self.env.functions[fn.value]
        self.scopes = [{}]
        for p in function_params(fn):
            self.declare(p, p.value, p.type, "param")
        self.stmt(function_body(fn))
        self.scopes = []
        self.current = None

    def block(self, stmts: list[Node]) -> None:
        self.scopes.append({})
        for s in stmts:
            self.stmt(s)
        self.scopes.pop()

    def stmt(self, node: Node) -> None:
        kind = node.kind
        if kind == "Compound":
            self.block(node.children)
        elif kind == "VarDecl":
            self.check_type(node, node.type)
            if node.children:
                self.assignable(node.type, self.expr(node.children[0]), node.children[0])
            self.declare(node, node.value, node.type, "local")
        elif kind == "Assign":
            target, value = node.children
            self.assignable(self.expr(target), self.expr(value), value)
        elif kind == "If":
            self.condition(node.children[0])
            for branch in node.children[1:]:
                self.block([branch])
        elif kind == "While":
            self.condition(node.children[0])
            self.block([node.children[1]])
        elif kind == "For":
            init, cond, update, body = node.children
            self.scopes.append({})
            if not (init.kind == "Compound" and not init.children):
                self.stmt(init)
            self.condition(cond)
            if not (update.kind == "Compound" and not update.children):
                self.stmt(update)
            self.block([body])
            self.scopes.pop()
        elif kind == "Switch":
            scrutinee = self.expr(node.children[0])
            if scrutinee != INT:
                raise _err(node.children[0], f"switch scrutinee must be int, got {scrutinee}")
            seen: set[str] = set()
            for arm in node.children[1:]:
                if arm.kind == "Case":
                    if arm.value in seen:
                        raise _err(arm, f"duplicate case label {arm.value}")
                    seen.add(arm.value)
                self.block(arm.children)
        elif kind == "Return":
            expected = self.current.returns
            if node.children:
                if expected == VOID:
                    raise _err(node, "void function returns a value")
                self.assignable(expected, self.expr(node.children[0]), node.children[0])
            elif expected != VOID:
                raise _err(node, "missing return value")
        elif kind == "ExprStmt":
            self.expr(node.children[0])
        else:  # pragma: no cover - parser never produces other kinds here
            raise _err(node, f"unexpected statement {kind}")

    def condition(self, node: Node) -> None:
        ty = self.expr(node)
        if ty not in (BOOL, INT):
            raise _err(node, f"condition must be bool or int, got {ty}")

    # -- expressions ---------------------------------------------------

    def expr(self, node: Node) -> Type:
        node.type = self._expr(node)
        return node.type

    def _expr(self, node: Node) -> Type:
        kind = node.kind
        if kind == "IntLit":
            return INT
        if kind == "FloatLit":
            return FLOAT
        if kind == "BoolLit":
            return BOOL
        if kind == "NullLit":
            return NULL
        if kind == "Name":
            ty, scope = self.lookup(node)
            node.scope = scope
            return ty
        if kind == "NewArray":
            size = self.expr(node.children[0])
            if size != INT:
                raise _err(node, f"array size must be int, got {size}")
            return node.type
        if kind == "Index":
            base = self.expr(node.children[0])
            index = self.expr(node.children[1])
            if not base.array:
                raise _err(node, f"cannot index a value of type {base}")
            if index != INT:
                raise _err(node.children[1], f"array index must be int, got {index}")
            return base.element
        if kind == "Field":
            base = self.expr(node.children[0])
            if base.array or base.name not in self.env.records:
                raise _err(node, f"type {base} has no fields")
            fields = self.env.records[base.name]
            if node.value not in fields:
                raise _err(node, f"type {base} has no field {node.value!r}")
            return fields[node.value]
        if kind == "Unary":
            operand = self.expr(node.children[0])
            if node.value == "!":
                return BOOL
            if not operand.numeric:
                raise _err(node, f"cannot negate {operand}")
            return operand
        if kind == "Binary":
            left = self.expr(node.children[0])
            right = self.expr(node.children[1])
            op = node.value
            if op in LOGICAL:
                return BOOL
            if op in COMPARISON:
                if op in ("==", "!=") and (left == right or NULL in (left, right)):
                    return BOOL
                if not (left.numeric and right.numeric):
                    raise _err(node, f"cannot compare {left} and {right}")
                return BOOL
            if not (left.numeric and right.numeric):
                raise _err(node, f"operator {op!r} needs numeric operands, got {left} and {right}")
            if op == "%" and (left != INT or right != INT):
                raise _err(node, "operator '%' needs int operands")
            return FLOAT if FLOAT in (left, right) else INT
        if kind == "Call":
            sig = self.env.functions.get(node.value)
            if sig is None:
                for frame in self.scopes:
                    if node.value in frame:
                        raise _err(node, f"{node.value!r} is not a function")
                raise _err(node, f"undeclared identifier {node.value!r}")
            if len(node.children) != len(sig.params):
                raise _err(node, f"{node.value!r} expects {len(sig.params)} arguments, got {len(node.children)}")
            for arg, pty in zip(node.children, sig.params):
                self.assignable(pty, self.expr(arg), arg)
            return sig.returns
        if kind == "Cast":
            source = self.expr(node.children[0])
            target = node.type
            self.check_type(node, target)
            if not (source == target or (source.numeric and target.numeric)
                    or (source == NULL and (target.array or target.is_record))):
                raise _err(node, f"cannot cast {source} to {target}")
            return target
        raise _err(node, f"unexpected expression {kind}")  # pragma: no cover


def resolve(program: Node) -> Env:
    """Resolve names and annotate every expression with its type.

    Shadowing is rejected: a local may not reuse the name of a global, a
    function, or any variable in an enclosing scope. Sibling scopes may
    reuse names.
    """
    return Resolver(program).run()
