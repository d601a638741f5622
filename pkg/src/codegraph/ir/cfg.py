"""Basic blocks, typed flow edges and control-flow graph construction."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field, replace
from enum import Enum

from codegraph.errors import CfgError
from codegraph.ir.tac import FunctionTac, Label, TacInstr, TacKind, entry_marker, exit_marker


class FlowKind(str, Enum):
    SEQ_EXEC = "SeqExec"
    COND_TRUE = "CondTrue"
    COND_FALSE = "CondFalse"
    SWITCH_BRANCH = "SwitchBranch"
    DATA_FLOW = "DataFlow"
    CALL_FLOW = "CallFlow"
    EXCEPTION_FLOW = "ExceptionFlow"

    @property
    def index(self) -> int:
        return FLOW_KINDS.index(self)


FLOW_KINDS = tuple(FlowKind)
CONTROL_KINDS = frozenset({FlowKind.SEQ_EXEC, FlowKind.COND_TRUE, FlowKind.COND_FALSE, FlowKind.SWITCH_BRANCH})


@dataclass(frozen=True)
class FlowEdge:
    src: int
    dst: int
    kind: FlowKind

    def reversed(self) -> FlowEdge:
        return FlowEdge(self.dst, self.src, self.kind)


@dataclass(eq=False)
class BasicBlock:
    id: int
    instrs: list[TacInstr]
    function: str
    role: str = "body"  # "entry", "exit" or "body"

    @property
    def terminator(self) -> TacInstr | None:
        if self.instrs and self.instrs[-1].is_terminator:
            return self.instrs[-1]
        return None


@dataclass(eq=False)
class Cfg:
    blocks: list[BasicBlock]
    edges: list[FlowEdge]
    functions: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def entry(self) -> dict[str, int]:
        return {name: ids[0] for name, ids in self.functions.items()}

    def successors(self, block: int, kinds=CONTROL_KINDS) -> list[int]:
        return [e.dst for e in self.edges if e.src == block and e.kind in kinds]

    def predecessors(self, block: int, kinds=CONTROL_KINDS) -> list[int]:
        return [e.src for e in self.edges if e.dst == block and e.kind in kinds]

    def edge_counts(self) -> Counter:
        return Counter(e.kind.value for e in self.edges)

    def dump(self) -> str:
        """Golden-file debug format: blocks with their TAC, then one line per edge."""
        lines: list[str] = []
        for name, (entry, exit_) in self.functions.items():
            lines.append(f"function {name} entry={entry} exit={exit_}")
        for b in self.blocks:
            lines.append(f"B{b.id} ({b.function}, {b.role}):")
            for instr in b.instrs:
                lines.append(f"    {instr.text()}")
        for e in self.edges:
            lines.append(f"{e.src} -> {e.dst} [{e.kind.value}]")
        return "\n".join(lines) + "\n"


class _EdgeSet:
    def __init__(self) -> None:
        self.edges: list[FlowEdge] = []
        self.seen: set[FlowEdge] = set()

    def add(self, src: int, dst: int, kind: FlowKind) -> None:
        edge = FlowEdge(src, dst, kind)
        if edge not in self.seen:
            self.seen.add(edge)
            self.edges.append(edge)


def _partition(fn: FunctionTac) -> tuple[list[list[TacInstr]], dict[str, int | None]]:
    """Split a function's items into maximal basic blocks.

    Returns the blocks and a map label -> block index (``None`` when the
    label falls off the end of the function, i.e. binds to the exit).
    """
    blocks: list[list[TacInstr]] = []
    bindings: dict[str, int | None] = {}
    pending: list[str] = []
    current: list[TacInstr] = []
    for item in fn.items:
        if isinstance(item, Label):
            if current:
                blocks.append(current)
                current = []
            pending.append(item.name)
            continue
        if not current:
            for name in pending:
                bindings[name] = len(blocks)
            pending = []
        current.append(item)
        if item.is_terminator:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    for name in pending:
        bindings[name] = None
    return blocks, bindings


def build_cfg(tac: list[FunctionTac]) -> Cfg:
    """Build the inter-procedural CFG of a compilation unit.

    Block ids are dense over the whole unit; each function contributes a
    synthetic entry block, its body blocks in layout order, and a synthetic
    exit block. Raises CfgError if a function contains unreachable code.
    """
    blocks: list[BasicBlock] = []
    edges = _EdgeSet()
    functions: dict[str, tuple[int, int]] = {}
    call_sites: list[tuple[int, str]] = []

    for fn in tac:
        body, bindings = _partition(fn)
        entry_id = len(blocks)
        base = entry_id + 1
        exit_id = base + len(body)
        functions[fn.name] = (entry_id, exit_id)
        blocks.append(BasicBlock(entry_id, [entry_marker(fn.decl)], fn.name, "entry"))
        for i, instrs in enumerate(body):
            blocks.append(BasicBlock(base + i, instrs, fn.name))
        blocks.append(BasicBlock(exit_id, [exit_marker(fn.decl)], fn.name, "exit"))

        def target(label: str) -> int:
            idx = bindings[label]
            return exit_id if idx is None else base + idx

        edges.add(entry_id, base if body else exit_id, FlowKind.SEQ_EXEC)
        for i, instrs in enumerate(body):
            bid = base + i
            last = instrs[-1]
            for instr in instrs:
                if instr.kind == TacKind.CALL:
                    call_sites.append((bid, instr.callee))
            if last.kind == TacKind.BRANCH:
                edges.add(bid, target(last.targets[0]), FlowKind.COND_TRUE)
                edges.add(bid, target(last.targets[1]), FlowKind.COND_FALSE)
            elif last.kind == TacKind.SWITCH:
                for lab in last.targets:
                    edges.add(bid, target(lab), FlowKind.SWITCH_BRANCH)
            elif last.kind == TacKind.JUMP:
                edges.add(bid, target(last.targets[0]), FlowKind.SEQ_EXEC)
            elif last.kind == TacKind.RETURN:
                edges.add(bid, exit_id, FlowKind.SEQ_EXEC)
            else:
                edges.add(bid, bid + 1, FlowKind.SEQ_EXEC)

    for bid, callee in call_sites:
        if callee in functions:
            edges.add(bid, functions[callee][0], FlowKind.CALL_FLOW)

    cfg = Cfg(blocks, edges.edges, functions)
    _check_reachable(cfg)
    return cfg


def _check_reachable(cfg: Cfg) -> None:
    succ: dict[int, list[int]] = {b.id: [] for b in cfg.blocks}
    for e in cfg.edges:
        if e.kind in CONTROL_KINDS:
            succ[e.src].append(e.dst)
    for name, (entry, exit_) in cfg.functions.items():
        seen = {entry}
        queue = deque([entry])
        while queue:
            for nxt in succ[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        for bid in range(entry, exit_ + 1):
            if bid not in seen:
                node = cfg.blocks[bid].instrs[0].ast
                raise CfgError(f"unreachable code in function {name!r}", node.line, node.column)


def reverse_graph(cfg: Cfg) -> Cfg:
    """Same blocks, every edge (u, v, kind) turned into (v, u, kind)."""
    return replace(cfg, edges=[e.reversed() for e in cfg.edges])
