"""The CodeGraph: typed block graph plus one augmented AST per block."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from codegraph.codemodel.augment import AstNode, BlockAst, augment_block_ast
from codegraph.codemodel.vocab import Vocabulary
from codegraph.dataflow import DefUse, ReachSets, compute_def_use, dataflow_edges, reaching_definitions
from codegraph.errors import FormatError, GraphError
from codegraph.ir.cfg import Cfg, FlowEdge, FlowKind, build_cfg
from codegraph.ir.tac import FunctionTac, lower_to_tac
from codegraph.lang.parser import parse_source
from codegraph.lang.syntax import Node

FORMAT_VERSION = 1
_KIND_BY_NAME = {k.value: k for k in FlowKind}


@dataclass
class CodeGraph:
    blocks: list[BlockAst]
    edges: list[FlowEdge]
    label: int | None = None
    vocab: Vocabulary | None = field(default=None, compare=False, repr=False)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def validate(self) -> None:
        for i, b in enumerate(self.blocks):
            if b.block != i:
                raise GraphError(f"block ids must be dense and ordered; found {b.block} at position {i}")
            if b.root is None:
                raise GraphError(f"block {i} has no AST")
        n = self.block_count
        seen = set()
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise GraphError(f"edge {e.src} -> {e.dst} [{e.kind.value}] dangles (block count {n})")
            if not isinstance(e.kind, FlowKind):
                raise GraphError(f"bad edge kind {e.kind!r}")
            if e in seen:
                raise GraphError(f"duplicate edge {e.src} -> {e.dst} [{e.kind.value}]")
            seen.add(e)

    def edge_counts(self) -> Counter:
        counts = Counter({k.value: 0 for k in FlowKind})
        counts.update(e.kind.value for e in self.edges)
        return counts


def assemble_graph(cfg: Cfg, dfedges: list[FlowEdge], blockasts: list[BlockAst],
                   vocab: Vocabulary | None = None, label: int | None = None) -> CodeGraph:
    by_id = {b.block: b for b in blockasts}
    missing = [blk.id for blk in cfg.blocks if blk.id not in by_id]
    if missing:
        raise GraphError(f"blocks without an AST: {missing}")
    extra = sorted(set(by_id) - {blk.id for blk in cfg.blocks})
    if extra:
        raise GraphError(f"ASTs without a block: {extra}")
    graph = CodeGraph([by_id[blk.id] for blk in cfg.blocks], list(cfg.edges) + list(dfedges), label, vocab)
    graph.validate()
    return graph


@dataclass
class Analysis:
    """Every intermediate product of the source-to-graph pipeline."""

    program: Node
    tac: list[FunctionTac]
    cfg: Cfg
    def_use: list[DefUse]
    reach: ReachSets
    dataflow: list[FlowEdge]
    graph: CodeGraph


def analyze(source: str, filename: str = "<input>", label: int | None = None) -> Analysis:
    from codegraph.errors import SourceError

    program = parse_source(source, filename)
    tac = lower_to_tac(program)
    try:
        cfg = build_cfg(tac)
    except SourceError as exc:
        exc.filename = filename
        raise
    du = compute_def_use(cfg)
    rs = reaching_definitions(cfg, du)
    df = dataflow_edges(cfg, rs, du)
    asts = [augment_block_ast(b) for b in cfg.blocks]
    graph = assemble_graph(cfg, df, asts, label=label)
    return Analysis(program, tac, cfg, du, rs, df, graph)


def build_code_graph(source: str, filename: str = "<input>", label: int | None = None) -> CodeGraph:
    return analyze(source, filename, label).graph


# -- interchange format ---------------------------------------------------

def to_json(graph: CodeGraph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "blocks": [{"id": b.block, "ast": b.root.to_json()} for b in graph.blocks],
        "edges": [{"src": e.src, "dst": e.dst, "kind": e.kind.value} for e in graph.edges],
        "label": graph.label,
    }


def serialize(graph: CodeGraph) -> bytes:
    return json.dumps(to_json(graph), separators=(",", ":")).encode("utf-8")


def _check_ast(obj, path: str) -> None:
    if not isinstance(obj, dict) or set(obj) != {"label", "children"}:
        raise FormatError(f"{path}: AST node must have exactly 'label' and 'children'")
    if not isinstance(obj["label"], str) or not isinstance(obj["children"], list):
        raise FormatError(f"{path}: bad AST node field types")
    for i, child in enumerate(obj["children"]):
        _check_ast(child, f"{path}.children[{i}]")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def from_json(obj) -> CodeGraph:
    if not isinstance(obj, dict) or obj.get("version") != FORMAT_VERSION:
        found = obj.get("version") if isinstance(obj, dict) else type(obj).__name__
        raise FormatError(f"unsupported CodeGraph format version {found!r}")
    if set(obj) != {"version", "blocks", "edges", "label"}:
        raise FormatError(f"unexpected top-level keys {sorted(obj)}")
    if not isinstance(obj["blocks"], list) or not isinstance(obj["edges"], list):
        raise FormatError("'blocks' and 'edges' must be lists")
    label = obj["label"]
    if label is not None and not _is_int(label):
        raise FormatError("'label' must be an integer or null")
    blocks = []
    for i, b in enumerate(obj["blocks"]):
        if not isinstance(b, dict) or set(b) != {"id", "ast"} or not _is_int(b["id"]):
            raise FormatError(f"blocks[{i}] must be {{'id': int, 'ast': node}}")
        _check_ast(b["ast"], f"blocks[{i}].ast")
        blocks.append(BlockAst(AstNode.from_json(b["ast"]), b["id"]))
    edges = []
    for i, e in enumerate(obj["edges"]):
        if not isinstance(e, dict) or set(e) != {"src", "dst", "kind"}:
            raise FormatError(f"edges[{i}] must have exactly src, dst, kind")
        if not (_is_int(e["src"]) and _is_int(e["dst"])):
            raise FormatError(f"edges[{i}] endpoints must be integers")
        kind = _KIND_BY_NAME.get(e["kind"])
        if kind is None:
            raise FormatError(f"edges[{i}] has unknown kind {e['kind']!r}")
        edges.append(FlowEdge(e["src"], e["dst"], kind))
    graph = CodeGraph(blocks, edges, label)
    try:
        graph.validate()
    except GraphError as exc:
        raise FormatError(str(exc)) from exc
    return graph


def deserialize(data: bytes | str) -> CodeGraph:
    try:
        obj = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(f"not a CodeGraph document: {exc}") from exc
    return from_json(obj)


# -- bag-of-words block features ------------------------------------------

def bow_block_features(block: BlockAst, vocab: Vocabulary) -> np.ndarray:
    counts = np.zeros(len(vocab))
    for label in block.root.labels():
        counts[vocab.encode(label)] += 1
    return counts
