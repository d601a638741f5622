"""Define/use sets, reaching definitions and DataFlow edges.

The analysis is intra-procedural: only SeqExec/CondTrue/CondFalse/SwitchBranch
edges propagate facts. Writes through an array index or a record field are
may-definitions: they generate a definition of the whole variable but kill
nothing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from codegraph.ir.cfg import CONTROL_KINDS, Cfg, FlowEdge, FlowKind
from codegraph.ir.tac import is_temp


class DefSite(NamedTuple):
    block: int
    index: int
    var: str


@dataclass
class DefUse:
    block: int
    define: set[tuple[str, int]] = field(default_factory=set)
    use: set[str] = field(default_factory=set)
    # definitions that survive to the end of the block, and the variables
    # whose earlier definitions this block kills
    gen: set[DefSite] = field(default_factory=set)
    strong: set[str] = field(default_factory=set)


@dataclass
class ReachSets:
    in_: dict[int, frozenset[DefSite]]
    out: dict[int, frozenset[DefSite]]
    iterations: int = 0


def block_def_use(block) -> DefUse:
    du = DefUse(block.id)
    live: dict[str, set[DefSite]] = {}
    for i, instr in enumerate(block.instrs):
        for var in instr.uses:
            if not is_temp(var) and var not in du.strong:
                du.use.add(var)
        for var in instr.defs:
            if is_temp(var):
                continue
            du.define.add((var, i))
            du.strong.add(var)
            live[var] = {DefSite(block.id, i, var)}
        for var in instr.weak_defs:
            if is_temp(var):
                continue
            du.define.add((var, i))
            live.setdefault(var, set()).add(DefSite(block.id, i, var))
    du.gen = {site for sites in live.values() for site in sites}
    return du


def compute_def_use(cfg: Cfg) -> list[DefUse]:
    """One DefUse per block, in block-id order; temporaries are excluded."""
    return [block_def_use(b) for b in cfg.blocks]


def _function_blocks(cfg: Cfg) -> list[list[int]]:
    groups: dict[str, list[int]] = {}
    for b in cfg.blocks:
        groups.setdefault(b.function, []).append(b.id)
    return list(groups.values())


def _reverse_postorder(entry: int, succ: dict[int, list[int]]) -> list[int]:
    order: list[int] = []
    seen = {entry}
    stack = [(entry, iter(sorted(succ[entry])))]
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            order.append(node)
        elif nxt not in seen:
            seen.add(nxt)
            stack.append((nxt, iter(sorted(succ[nxt]))))
    order.reverse()
    return order


def reaching_definitions(cfg: Cfg, du: list[DefUse]) -> ReachSets:
    """Least fixpoint of the forward may-analysis, solved with a worklist.

    The worklist is seeded in reverse post-order (ties by block id), so the
    result and the iteration count are deterministic.
    """
    by_block = {d.block: d for d in du}
    succ: dict[int, list[int]] = {b.id: [] for b in cfg.blocks}
    pred: dict[int, list[int]] = {b.id: [] for b in cfg.blocks}
    for e in cfg.edges:
        if e.kind in CONTROL_KINDS:
            succ[e.src].append(e.dst)
            pred[e.dst].append(e.src)

    in_: dict[int, frozenset[DefSite]] = {}
    out: dict[int, frozenset[DefSite]] = {}
    iterations = 0
    entries = {ids[0] for ids in cfg.functions.values()}
    for ids in _function_blocks(cfg):
        members = set(ids)
        all_defs: dict[str, set[DefSite]] = {}
        for bid in ids:
            for site in by_block[bid].gen:
                all_defs.setdefault(site.var, set()).add(site)
            for var, idx in by_block[bid].define:
                all_defs.setdefault(var, set()).add(DefSite(bid, idx, var))
        kill = {
            bid: frozenset(s for var in by_block[bid].strong for s in all_defs.get(var, ()))
            - by_block[bid].gen
            for bid in ids
        }
        gen = {bid: frozenset(by_block[bid].gen) for bid in ids}

        entry = next((b for b in ids if b in entries), ids[0])
        order = _reverse_postorder(entry, {b: [s for s in succ[b] if s in members] for b in ids})
        order += [b for b in ids if b not in set(order)]
        for bid in ids:
            in_[bid] = frozenset()
            out[bid] = gen[bid]
        work = deque(order)
        queued = set(order)
        while work:
            bid = work.popleft()
            queued.discard(bid)
            iterations += 1
            if bid == entry:
                new_in: frozenset[DefSite] = frozenset()
            else:
                new_in = frozenset().union(*(out[p] for p in pred[bid] if p in members))
            in_[bid] = new_in
            new_out = gen[bid] | (new_in - kill[bid])
            if new_out != out[bid]:
                out[bid] = new_out
                for s in sorted(succ[bid]):
                    if s in members and s not in queued:
                        work.append(s)
                        queued.add(s)
    return ReachSets(in_, out, iterations)


def dataflow_edges(cfg: Cfg, rs: ReachSets, du: list[DefUse]) -> list[FlowEdge]:
    """DataFlow edges from each defining block to each block whose upward-exposed use it reaches."""
    pairs: set[tuple[int, int]] = set()
    for d in du:
        if not d.use:
            continue
        for site in rs.in_.get(d.block, ()):
            if site.var in d.use:
                pairs.add((site.block, d.block))
    return [FlowEdge(src, dst, FlowKind.DATA_FLOW) for src, dst in sorted(pairs)]
