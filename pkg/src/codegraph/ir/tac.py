"""Lowering from ProgramAst to three-address code.

Expressions stay whole inside one instruction except for calls, which are
hoisted into their own ``call`` instruction, and short-circuit ``&&``/``||``,
which become branches. Compiler temporaries are named ``%tN``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from codegraph.lang.syntax import Node, function_body, function_params
from codegraph.lang.printer import expr_text


class TacKind(str, Enum):
    DEF = "def-stmt"
    BRANCH = "branch-cond"
    SWITCH = "switch"
    CALL = "call"
    RETURN = "return"
    JUMP = "jump"
    MARKER = "marker"


TERMINATORS = frozenset({TacKind.BRANCH, TacKind.SWITCH, TacKind.JUMP, TacKind.RETURN})


def is_temp(name: str) -> bool:
    return name.startswith("%t")


@dataclass(eq=False)
class TacInstr:
    kind: TacKind
    operands: tuple[str, ...]
    ast: Node
    defs: tuple[str, ...] = ()
    weak_defs: tuple[str, ...] = ()
    uses: tuple[str, ...] = ()
    targets: tuple[str, ...] = ()
    case_values: tuple[str, ...] = ()
    callee: str | None = None

    def __post_init__(self) -> None:
        if self.ast is None:
            raise ValueError("every TAC instruction needs a backing AST node")
        if self.kind == TacKind.BRANCH and (len(self.operands) != 1 or len(self.targets) != 2):
            raise ValueError("branch-cond takes one condition and two targets")

    @property
    def is_terminator(self) -> bool:
        return self.kind in TERMINATORS

    def text(self) -> str:
        k = self.kind
        if k == TacKind.DEF:
            dest = (self.defs or self.weak_defs or ("",))[0]
            if self.ast.kind == "Assign":
                dest = expr_text(self.ast.children[0])
            if not dest:
                return self.operands[0]
            return f"{dest} = {self.operands[0]}"
        if k == TacKind.CALL:
            return f"{self.defs[0]} = call {self.callee}({', '.join(self.operands)})"
        if k == TacKind.BRANCH:
            return f"if {self.operands[0]} goto {self.targets[0]} else {self.targets[1]}"
        if k == TacKind.SWITCH:
            arms = ", ".join(f"{v}: {t}" for v, t in zip(self.case_values, self.targets))
            if len(self.targets) > len(self.case_values):
                arms += (", " if arms else "") + f"default: {self.targets[-1]}"
            return f"switch {self.operands[0]} [{arms}]"
        if k == TacKind.RETURN:
            return "return" + (f" {self.operands[0]}" if self.operands else "")
        if k == TacKind.JUMP:
            return f"goto {self.targets[0]}"
        return " ".join(self.operands)


@dataclass(frozen=True)
class Label:
    name: str


@dataclass
class FunctionTac:
    name: str
    decl: Node
    items: list[TacInstr | Label] = field(default_factory=list)

    @property
    def instrs(self) -> list[TacInstr]:
        return [i for i in self.items if isinstance(i, TacInstr)]


def _is_empty(node: Node) -> bool:
    return node.kind == "Compound" and not node.children


class _Lowerer:
    def __init__(self, fn: Node):
        self.fn = fn
        self.out = FunctionTac(fn.value, fn)
        self.temps = 0
        self.labels = 0
        self.dead = False

    def temp(self) -> str:
        name = f"%t{self.temps}"
        self.temps += 1
        return name

    def label(self) -> Label:
        lab = Label(f"L{self.labels}")
        self.labels += 1
        return lab

    def place(self, lab: Label) -> None:
        self.out.items.append(lab)
        self.dead = False

    def emit(self, instr: TacInstr) -> None:
        self.out.items.append(instr)
        if instr.is_terminator:
            self.dead = True

    def jump(self, target: Label, ast: Node) -> None:
        # a jump from code that already left the block would be unreachable
        if not self.dead:
            self.emit(TacInstr(TacKind.JUMP, (), ast, targets=(target.name,)))

    # -- expressions ---------------------------------------------------

    def value(self, e: Node, uses: list[str]) -> str:
        kind = e.kind
        if kind in ("IntLit", "FloatLit", "BoolLit"):
            return e.value
        if kind == "NullLit":
            return "null"
        if kind == "Name":
            uses.append(e.value)
            return e.value
        if kind == "Index":
            base = self.value(e.children[0], uses)
            return f"{base}[{self.value(e.children[1], uses)}]"
        if kind == "Field":
            return f"{self.value(e.children[0], uses)}.{e.value}"
        if kind == "Unary":
            return f"{e.value}{self.value(e.children[0], uses)}"
        if kind == "Cast":
            return f"({e.type}) {self.value(e.children[0], uses)}"
        if kind == "NewArray":
            return f"new {e.type.element}[{self.value(e.children[0], uses)}]"
        if kind == "Call":
            call_uses: list[str] = []
            args = tuple(self.value(a, call_uses) for a in e.children)
            dest = self.temp()
            self.emit(TacInstr(TacKind.CALL, args, e, defs=(dest,), uses=tuple(call_uses), callee=e.value))
            return dest
        if kind == "Binary" and e.value in ("&&", "||"):
            return self.short_circuit(e)
        if kind == "Binary":
            left = self.value(e.children[0], uses)
            right = self.value(e.children[1], uses)
            return f"{left} {e.value} {right}"
        raise ValueError(f"cannot lower expression {kind}")

    def short_circuit(self, e: Node) -> str:
        lhs, rhs = e.children
        dest = self.temp()
        lhs_uses: list[str] = []
        lt = self.value(lhs, lhs_uses)
        self.emit(TacInstr(TacKind.DEF, (lt,), lhs, defs=(dest,), uses=tuple(lhs_uses)))
        rhs_label, end = self.label(), self.label()
        targets = (rhs_label.name, end.name) if e.value == "&&" else (end.name, rhs_label.name)
        self.emit(TacInstr(TacKind.BRANCH, (dest,), lhs, uses=(dest,), targets=targets))
        self.place(rhs_label)
        rhs_uses: list[str] = []
        rt = self.value(rhs, rhs_uses)
        self.emit(TacInstr(TacKind.DEF, (rt,), rhs, defs=(dest,), uses=tuple(rhs_uses)))
        self.place(end)
        return dest

    def condition(self, e: Node, on_true: Label, on_false: Label) -> None:
        if e.kind == "Binary" and e.value == "&&":
            mid = self.label()
            self.condition(e.children[0], mid, on_false)
            self.place(mid)
            self.condition(e.children[1], on_true, on_false)
            return
        if e.kind == "Binary" and e.value == "||":
            mid = self.label()
            self.condition(e.children[0], on_true, mid)
            self.place(mid)
            self.condition(e.children[1], on_true, on_false)
            return
        uses: list[str] = []
        operand = self.value(e, uses)
        self.emit(TacInstr(TacKind.BRANCH, (operand,), e, uses=tuple(uses), targets=(on_true.name, on_false.name)))

    # -- statements ----------------------------------------------------

    def lvalue(self, target: Node, uses: list[str]) -> tuple[str, bool]:
        """Return (root variable, strong) for an assignment target."""
        if target.kind == "Name":
            return target.value, True
        node = target
        while node.kind in ("Index", "Field"):
            if node.kind == "Index":
                self.value(node.children[1], uses)
            node = node.children[0]
        if node.kind != "Name":  # pragma: no cover - parser restricts lvalues
            raise ValueError("assignment target has no root variable")
        return node.value, False

    def stmt(self, s: Node) -> None:
        kind = s.kind
        if kind == "Compound":
            for child in s.children:
                self.stmt(child)
        elif kind == "VarDecl":
            uses: list[str] = []
            operand = self.value(s.children[0], uses) if s.children else "default"
            self.emit(TacInstr(TacKind.DEF, (operand,), s, defs=(s.value,), uses=tuple(uses)))
        elif kind == "Assign":
            uses = []
            operand = self.value(s.children[1], uses)
            root, strong = self.lvalue(s.children[0], uses)
            if strong:
                self.emit(TacInstr(TacKind.DEF, (operand,), s, defs=(root,), uses=tuple(uses)))
            else:
                self.emit(TacInstr(TacKind.DEF, (operand,), s, weak_defs=(root,), uses=tuple(uses)))
        elif kind == "ExprStmt":
            expr = s.children[0]
            uses = []
            if expr.kind == "Call":
                self.value(expr, uses)
            else:
                operand = self.value(expr, uses)
                self.emit(TacInstr(TacKind.DEF, (operand,), s, uses=tuple(uses)))
        elif kind == "Return":
            uses = []
            operands = (self.value(s.children[0], uses),) if s.children else ()
            self.emit(TacInstr(TacKind.RETURN, operands, s, uses=tuple(uses)))
        elif kind == "If":
            then_l, end = self.label(), self.label()
            else_l = self.label() if len(s.children) > 2 else end
            self.condition(s.children[0], then_l, else_l)
            self.place(then_l)
            self.stmt(s.children[1])
            if len(s.children) > 2:
                self.jump(end, s)
                self.place(else_l)
                self.stmt(s.children[2])
            self.place(end)
        elif kind == "While":
            head, body, end = self.label(), self.label(), self.label()
            self.place(head)
            self.condition(s.children[0], body, end)
            self.place(body)
            self.stmt(s.children[1])
            self.jump(head, s)
            self.place(end)
        elif kind == "For":
            init, cond, update, body_stmt = s.children
            if not _is_empty(init):
                self.stmt(init)
            head, body, end = self.label(), self.label(), self.label()
            self.place(head)
            self.condition(cond, body, end)
            self.place(body)
            self.stmt(body_stmt)
            if not _is_empty(update) and not self.dead:
                self.stmt(update)
            self.jump(head, s)
            self.place(end)
        elif kind == "Switch":
            uses = []
            operand = self.value(s.children[0], uses)
            arms = s.children[1:]
            end = self.label()
            arm_labels = [self.label() for _ in arms]
            case_values = tuple(a.value for a in arms if a.kind == "Case")
            targets = [lab.name for lab, a in zip(arm_labels, arms) if a.kind == "Case"]
            default = [lab.name for lab, a in zip(arm_labels, arms) if a.kind == "Default"]
            targets.append(default[0] if default else end.name)
            self.emit(TacInstr(TacKind.SWITCH, (operand,), s.children[0], uses=tuple(uses),
                               targets=tuple(targets), case_values=case_values))
            for lab, arm in zip(arm_labels, arms):
                self.place(lab)
                for child in arm.children:
                    self.stmt(child)
                self.jump(end, arm)
            self.place(end)
        else:  # pragma: no cover
            raise ValueError(f"cannot lower statement {kind}")


def lower_function(fn: Node) -> FunctionTac:
    low = _Lowerer(fn)
    low.stmt(function_body(fn))
    return low.out


def lower_to_tac(program: Node) -> list[FunctionTac]:
    """Lower every defined function of a resolved program, in source order."""
    return [lower_function(fn) for fn in program.children
            if fn.kind == "FunctionDecl" and function_body(fn) is not None]


def entry_marker(fn: Node) -> TacInstr:
    params = tuple(p.value for p in function_params(fn))
    return TacInstr(TacKind.MARKER, ("entry", fn.value, *params), fn, defs=params)


def exit_marker(fn: Node) -> TacInstr:
    return TacInstr(TacKind.MARKER, ("exit", fn.value), fn)
