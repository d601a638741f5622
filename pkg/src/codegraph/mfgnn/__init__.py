"""Tree-convolution local features, attention message passing and prediction heads."""

from codegraph.mfgnn.config import DEFAULT_CONFIG, TABLE_VARIANTS, AblationConfig, load_config, parse_config
from codegraph.mfgnn.encode import Batch, EncodedGraph, encode_graph, encode_tree, make_batch, tbcnn_weights
from codegraph.mfgnn.layers import (
    agn4d_layer, attention_coefficients, classify, clone_score, fuse_and_pool, tbcnn_forward,
)
from codegraph.mfgnn.model import Dims, ForwardTrace, Mfgnn, forward_with_config, init_params, select_edges

__all__ = [
    "AblationConfig", "Batch", "DEFAULT_CONFIG", "Dims", "EncodedGraph", "ForwardTrace", "Mfgnn",
    "TABLE_VARIANTS", "agn4d_layer", "attention_coefficients", "classify", "clone_score", "encode_graph",
    "encode_tree", "forward_with_config", "fuse_and_pool", "init_params", "load_config", "make_batch",
    "parse_config", "select_edges", "tbcnn_forward", "tbcnn_weights",
]
