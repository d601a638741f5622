"""Flatten CodeGraphs into index arrays and merge them into disjoint batches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from codegraph.codemodel.augment import AstNode
from codegraph.codemodel.graph import CodeGraph
from codegraph.codemodel.vocab import Vocabulary
from codegraph.ir.cfg import FlowKind


def tbcnn_weights(depth: int, max_depth: int, position: int, siblings: int) -> tuple[float, float, float]:
    """Depth-weighted (top, left, right) coefficients of one tree node.

    ``depth`` and ``position`` are 1-based; ``siblings`` counts the node
    itself. A one-level tree gets a top weight of 1 and a lone child sits
    halfway between left and right.
    """
    top = 1.0 if max_depth == 1 else (depth - 1) / (max_depth - 1)
    ratio = 0.5 if siblings == 1 else (position - 1) / (siblings - 1)
    left = top * ratio
    right = top * (1.0 - left)
    return top, left, right


@dataclass
class TreeArrays:
    """Preorder node arrays of one or more trees."""

    labels: np.ndarray   # (N,) vocabulary ids
    eta: np.ndarray      # (N, 3) top/left/right coefficients
    parent: np.ndarray   # (N,) parent row, -1 for roots
    tree: np.ndarray     # (N,) which tree each node belongs to


def encode_tree(root: AstNode, vocab: Vocabulary) -> TreeArrays:
    rows: list[tuple[AstNode, int, int, int, int]] = []   # node, depth, parent, position, siblings
    stack = [(root, 1, -1, 1, 1)]
    while stack:
        node, depth, parent, pos, sib = stack.pop()
        me = len(rows)
        rows.append((node, depth, parent, pos, sib))
        n = len(node.children)
        for i in range(n - 1, -1, -1):
            stack.append((node.children[i], depth + 1, me, i + 1, n))
    max_depth = max(r[1] for r in rows)
    return TreeArrays(
        labels=np.array([vocab.encode(r[0].label) for r in rows], dtype=np.int64),
        eta=np.array([tbcnn_weights(r[1], max_depth, r[3], r[4]) for r in rows]).reshape(-1, 3),
        parent=np.array([r[2] for r in rows], dtype=np.int64),
        tree=np.zeros(len(rows), dtype=np.int64),
    )


@dataclass
class EncodedGraph:
    trees: TreeArrays            # tree index = block id
    num_blocks: int
    src: np.ndarray
    dst: np.ndarray
    kind: np.ndarray             # FlowKind.index per edge
    label: int | None = None
    bow: np.ndarray | None = None   # (blocks, vocab) label counts


def _concat_trees(parts: Sequence[TreeArrays]) -> TreeArrays:
    offsets = np.cumsum([0] + [len(p.labels) for p in parts])
    return TreeArrays(
        labels=np.concatenate([p.labels for p in parts]),
        eta=np.concatenate([p.eta for p in parts]).reshape(-1, 3),
        parent=np.concatenate([np.where(p.parent >= 0, p.parent + off, -1) for p, off in zip(parts, offsets)]),
        tree=np.concatenate([np.full(len(p.labels), i, dtype=np.int64) for i, p in enumerate(parts)]),
    )


def encode_graph(graph: CodeGraph, vocab: Vocabulary) -> EncodedGraph:
    trees = _concat_trees([encode_tree(b.root, vocab) for b in graph.blocks])
    bow = np.zeros((graph.block_count, len(vocab)))
    np.add.at(bow, (trees.tree, trees.labels), 1.0)
    return EncodedGraph(
        trees=trees,
        num_blocks=graph.block_count,
        src=np.array([e.src for e in graph.edges], dtype=np.int64),
        dst=np.array([e.dst for e in graph.edges], dtype=np.int64),
        kind=np.array([e.kind.index for e in graph.edges], dtype=np.int64),
        label=graph.label,
        bow=bow,
    )


@dataclass
class Batch:
    """Disjoint union of several graphs with block rows numbered consecutively."""

    trees: TreeArrays
    num_blocks: int
    block_graph: np.ndarray      # (blocks,) graph index of each block
    num_graphs: int
    src: np.ndarray
    dst: np.ndarray
    kind: np.ndarray
    bow: np.ndarray
    labels: np.ndarray | None


def make_batch(graphs: Sequence[EncodedGraph]) -> Batch:
    block_off = np.cumsum([0] + [g.num_blocks for g in graphs])
    trees = _concat_trees([g.trees for g in graphs])
    # tree ids were per-graph block ids; shift them to batch block rows
    node_graph = np.concatenate([np.full(len(g.trees.labels), i, dtype=np.int64) for i, g in enumerate(graphs)])
    trees.tree = np.concatenate([g.trees.tree for g in graphs]) + block_off[node_graph]
    labels = [g.label for g in graphs]
    return Batch(
        trees=trees,
        num_blocks=int(block_off[-1]),
        block_graph=np.concatenate([np.full(g.num_blocks, i, dtype=np.int64) for i, g in enumerate(graphs)]),
        num_graphs=len(graphs),
        src=np.concatenate([g.src + off for g, off in zip(graphs, block_off)]).astype(np.int64),
        dst=np.concatenate([g.dst + off for g, off in zip(graphs, block_off)]).astype(np.int64),
        kind=np.concatenate([g.kind for g in graphs]).astype(np.int64),
        bow=np.concatenate([g.bow for g in graphs]),
        labels=None if any(l is None for l in labels) else np.array(labels, dtype=np.int64),
    )


DATAFLOW = FlowKind.DATA_FLOW.index
