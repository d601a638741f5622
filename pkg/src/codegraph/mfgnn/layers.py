"""Model layers written against the tensor core."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from codegraph.errors import ShapeError
from codegraph.tensor import F, Tensor
from codegraph.mfgnn.encode import TreeArrays

LEAKY_SLOPE = 0.2


def tbcnn_forward(trees: TreeArrays, num_trees: int, embedding: Tensor, w_top: Tensor, w_left: Tensor,
                  w_right: Tensor, bias: Tensor) -> Tensor:
    """Tree convolution over every node window, max-pooled per tree.

    Each node contributes ``eta_t*W_t + eta_l*W_l + eta_r*W_r`` applied to
    its embedding to its own window and to its parent's window.
    """
    e = F.gather_rows(embedding, trees.labels)
    eta = trees.eta
    contrib = F.add(F.add(
        F.mul(F.matmul(e, w_top), Tensor(eta[:, 0:1])),
        F.mul(F.matmul(e, w_left), Tensor(eta[:, 1:2]))),
        F.mul(F.matmul(e, w_right), Tensor(eta[:, 2:3])))
    has_parent = np.flatnonzero(trees.parent >= 0)
    n = len(trees.labels)
    from_children = F.scatter_add(F.gather_rows(contrib, has_parent), trees.parent[has_parent], n)
    y = F.tanh(F.add(F.add(contrib, from_children), bias))
    return F.segment_max(y, trees.tree, num_trees)


def bow_forward(counts: np.ndarray, proj: Tensor) -> Tensor:
    return F.matmul(Tensor(counts), proj)


@dataclass
class Aggregation:
    hidden: Tensor               # (blocks, width) aggregated neighbor messages
    alpha: np.ndarray | None     # (edges,) attention weight per edge, None for GCN


def attention_aggregate(keys: Tensor, src: np.ndarray, dst: np.ndarray, kind: np.ndarray,
                        p_src: Tensor, p_dst: Tensor) -> Aggregation:
    """ELU of the attention-weighted sum of successor keys.

    Each edge ``(u, v, f)`` is one attention slot for ``u`` with logit
    ``<p_src, k_u> + <p_dst[:, f], k_v>``. Blocks without successors get
    a zero vector.
    """
    n = keys.shape[0]
    src_score = F.reshape(F.matmul(keys, p_src), (n,))
    dst_score = F.matmul(keys, p_dst)
    logits = F.add(F.gather_rows(src_score, src), F.pick(dst_score, dst, kind))
    alpha = F.segment_softmax(F.leaky_relu(logits, LEAKY_SLOPE), src, n)
    messages = F.mul(F.gather_rows(keys, dst), F.reshape(alpha, (len(src), 1)))
    return Aggregation(F.elu(F.scatter_add(messages, src, n)), alpha.data)


def sum_aggregate(keys: Tensor, src: np.ndarray, dst: np.ndarray) -> Aggregation:
    """Plain sum of transformed successor features."""
    return Aggregation(F.scatter_add(F.gather_rows(keys, dst), src, keys.shape[0]), None)


def attention_coefficients(k_u: np.ndarray, k_succ: np.ndarray, kinds, p_src: np.ndarray,
                           p_dst: np.ndarray) -> np.ndarray:
    """Attention weights of one block over its outgoing edges (one row of ``k_succ`` per edge)."""
    p_src = np.asarray(p_src, dtype=np.float64).reshape(-1)
    p_dst = np.asarray(p_dst, dtype=np.float64)
    k_succ = np.atleast_2d(np.asarray(k_succ, dtype=np.float64))
    kinds = np.asarray(kinds, dtype=np.int64)
    if p_dst.ndim == 1:
        p_dst = p_dst[:, None]
    logits = float(np.dot(p_src, k_u)) + np.einsum("ij,ji->i", k_succ, p_dst[:, kinds])
    logits = np.where(logits > 0, logits, LEAKY_SLOPE * logits)
    z = np.exp(logits - logits.max())
    return z / z.sum()


@dataclass
class LayerOutput:
    hidden: Tensor               # H_l
    context: Tensor              # h_o + h_r
    alpha_o: np.ndarray | None
    alpha_r: np.ndarray | None


def agn4d_layer(h_prev: Tensor, src: np.ndarray, dst: np.ndarray, kind: np.ndarray, params: dict[str, Tensor],
                combine: str = "sum", aggregator: str = "agn4d") -> LayerOutput:
    """One message-passing layer over the graph and its reverse.

    ``params`` holds ``w_key_o``, ``w_key_r`` and, for attention,
    ``p_src_o``, ``p_dst_o``, ``p_src_r``, ``p_dst_r``.
    """
    if h_prev.data.ndim != 2 or h_prev.shape[1] != params["w_key_o"].shape[0]:
        raise ShapeError(f"agn4d: features {h_prev.shape} vs key matrix {params['w_key_o'].shape}")
    k_o = F.matmul(h_prev, params["w_key_o"])
    k_r = F.matmul(h_prev, params["w_key_r"])
    if aggregator == "agn4d":
        fwd = attention_aggregate(k_o, src, dst, kind, params["p_src_o"], params["p_dst_o"])
        rev = attention_aggregate(k_r, dst, src, kind, params["p_src_r"], params["p_dst_r"])
    else:
        fwd = sum_aggregate(k_o, src, dst)
        rev = sum_aggregate(k_r, dst, src)
    context = F.add(fwd.hidden, rev.hidden)
    if combine == "sum":
        if context.shape != h_prev.shape:
            raise ShapeError(f"agn4d: summation needs equal widths, got {context.shape} and {h_prev.shape}")
        hidden = F.add(context, h_prev)
    else:
        hidden = F.concat([context, h_prev], axis=1)
    return LayerOutput(hidden, context, fwd.alpha, rev.alpha)


def fuse_and_pool(local: Tensor, contextual: Tensor, block_graph: np.ndarray | None = None,
                  num_graphs: int = 1) -> Tensor:
    """Add local and contextual block features, then max-pool blocks per graph."""
    if local.shape != contextual.shape:
        raise ShapeError(f"fuse: local {local.shape} vs contextual {contextual.shape}")
    if block_graph is None:
        block_graph = np.zeros(local.shape[0], dtype=np.int64)
    return F.segment_max(F.add(local, contextual), block_graph, num_graphs)


def class_logits(vectors: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return F.add(F.matmul(vectors, weight), bias)


def classify(vectors: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Class probabilities, one row per program vector."""
    return F.softmax(class_logits(vectors, weight, bias), axis=1)


def clone_logit(v1: Tensor, v2: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    if v1.shape != v2.shape:
        raise ShapeError(f"clone: {v1.shape} vs {v2.shape}")
    diff = F.abs(F.sub(v1, v2))
    return F.reshape(F.add(F.matmul(diff, weight), bias), (v1.shape[0],))


def clone_score(v1: Tensor, v2: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Probability that each row pair is a clone."""
    return F.sigmoid(clone_logit(v1, v2, weight, bias))
