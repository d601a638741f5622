"""Seeded finite-difference checks, one per layer type."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from codegraph.codemodel.augment import AstNode
from codegraph.codemodel.graph import build_code_graph
from codegraph.codemodel.vocab import Vocabulary
from codegraph.mfgnn.encode import encode_graph, encode_tree, make_batch
from codegraph.mfgnn.layers import agn4d_layer, class_logits, clone_logit, fuse_and_pool, tbcnn_forward
from codegraph.mfgnn.model import NUM_KINDS
from codegraph.tensor import F, Tensor, finite_diff_check

DIAMOND_SOURCE = """\
void f(int a, int b) {
    int c;
    if (a < b)
        c = a + b;
    else
        c = a - b;
}
"""

TOLERANCE = 1e-4


@dataclass
class GradRow:
    layer: str
    error: float
    params: int

    @property
    def ok(self) -> bool:
        return bool(self.error < TOLERANCE)


def _param(rng, *shape, scale=0.5) -> Tensor:
    return Tensor(rng.normal(0.0, scale, size=shape), requires_grad=True)


def _projection_loss(out: Tensor, rng) -> callable:
    # Small weights keep |loss| near 1e-2. Coordinates whose true gradient is
    # zero then show at most ~1e-5 relative error from one-ulp rounding.
    weights = Tensor(rng.normal(0.0, 0.01, size=out.shape))
    return lambda t: F.mean(F.mul(t, weights))


def _five_node_tree() -> AstNode:
    return AstNode("Block", [
        AstNode("DefStmt", [AstNode("Local", [AstNode("x")]), AstNode("Const", [AstNode("1")])]),
        AstNode("ReturnOp"),
    ])


def check_tbcnn(rng, h: float = 1e-5, embed: int = 4, hidden: int = 6) -> GradRow:
    tree = _five_node_tree()
    vocab = Vocabulary(sorted(set(tree.labels())), frozen=True)
    arrays = encode_tree(tree, vocab)
    params = [_param(rng, len(vocab), embed, scale=1.0), _param(rng, embed, hidden), _param(rng, embed, hidden),
              _param(rng, embed, hidden), _param(rng, hidden)]
    forward = lambda: tbcnn_forward(arrays, 1, *params)
    loss = _projection_loss(forward(), rng)
    return GradRow("tbcnn", finite_diff_check(lambda: loss(forward()), params, h), sum(p.size for p in params))


def _diamond_edges():
    graph = build_code_graph(DIAMOND_SOURCE)
    enc = encode_graph(graph, Vocabulary(frozen=True))
    return enc.num_blocks, enc.src, enc.dst, enc.kind


def check_agn4d(rng, h: float = 1e-5, hidden: int = 6, layers: int = 3) -> list[GradRow]:
    """Each layer of a stack checked on its own random input."""
    n, src, dst, kind = _diamond_edges()
    rows = []
    for i in range(layers):
        x = Tensor(rng.normal(size=(n, hidden)))
        layer = {
            "w_key_o": _param(rng, hidden, hidden), "w_key_r": _param(rng, hidden, hidden),
            "p_src_o": _param(rng, hidden, 1, scale=1.0), "p_dst_o": _param(rng, hidden, NUM_KINDS, scale=1.0),
            "p_src_r": _param(rng, hidden, 1, scale=1.0), "p_dst_r": _param(rng, hidden, NUM_KINDS, scale=1.0),
        }
        forward = lambda: agn4d_layer(x, src, dst, kind, layer).hidden
        loss = _projection_loss(forward(), rng)
        params = list(layer.values())
        err = finite_diff_check(lambda: loss(forward()), params, h)
        rows.append(GradRow(f"agn4d layer {i + 1}", err, sum(p.size for p in params)))
    return rows


def check_fusion_classifier(rng, h: float = 1e-5, hidden: int = 6, classes: int = 3) -> GradRow:
    blocks = np.array([0, 0, 0, 1, 1])
    local = _param(rng, 5, hidden, scale=1.0)
    ctx = _param(rng, 5, hidden, scale=1.0)
    weight, bias = _param(rng, hidden, classes), _param(rng, classes)
    labels = np.array([2, 0])
    params = [local, ctx, weight, bias]
    forward = lambda: F.cross_entropy_with_logits(class_logits(fuse_and_pool(local, ctx, blocks, 2), weight, bias),
                                                  labels)
    return GradRow("fusion+classifier", finite_diff_check(forward, params, h), sum(p.size for p in params))


def check_clone_head(rng, h: float = 1e-5, hidden: int = 6) -> GradRow:
    v1, v2 = _param(rng, 4, hidden, scale=1.0), _param(rng, 4, hidden, scale=1.0)
    weight, bias = _param(rng, hidden, 1), _param(rng, 1)
    targets = np.array([1, 0, 1, 0])
    params = [v1, v2, weight, bias]
    forward = lambda: F.bce_with_logits(clone_logit(v1, v2, weight, bias), targets)
    return GradRow("clone head", finite_diff_check(forward, params, h), sum(p.size for p in params))


def gradient_report(seed: int = 42, h: float = 1e-5) -> list[GradRow]:
    rng = np.random.default_rng(seed)
    return [check_tbcnn(rng, h), *check_agn4d(rng, h), check_fusion_classifier(rng, h), check_clone_head(rng, h)]
