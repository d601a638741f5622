"""Parameter initialization and the full forward pass."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from codegraph.errors import ConfigError
from codegraph.ir.cfg import FLOW_KINDS
from codegraph.mfgnn.config import DEFAULT_CONFIG, AblationConfig
from codegraph.mfgnn.encode import DATAFLOW, Batch
from codegraph.mfgnn.layers import (
    LayerOutput, agn4d_layer, bow_forward, class_logits, clone_logit, fuse_and_pool, tbcnn_forward,
)
from codegraph.tensor import F, Tensor
from codegraph.tensor.init import glorot_uniform, uniform, zeros

NUM_KINDS = len(FLOW_KINDS)


@dataclass(frozen=True)
class Dims:
    vocab: int
    embed: int = 50
    hidden: int = 200
    layers: int = 3
    classes: int = 2


def init_params(dims: Dims, config: AblationConfig = DEFAULT_CONFIG, task: str = "classify",
                seed: int = 42) -> dict[str, Tensor]:
    """Fresh parameters, drawn in a fixed order from ``default_rng(seed)``."""
    if task not in ("classify", "clone"):
        raise ConfigError(f"unknown task {task!r}")
    if task == "classify" and dims.classes < 2:
        raise ConfigError("a classifier needs at least two classes")
    rng = np.random.default_rng(seed)
    h = dims.hidden
    p: dict[str, Tensor] = {}
    if config.block_repr == "ast":
        p["embedding"] = uniform(rng, (dims.vocab, dims.embed), 0.05)
        p["tbcnn.w_top"] = glorot_uniform(rng, dims.embed, h)
        p["tbcnn.w_left"] = glorot_uniform(rng, dims.embed, h)
        p["tbcnn.w_right"] = glorot_uniform(rng, dims.embed, h)
        p["tbcnn.bias"] = zeros((h,))
    else:
        p["bow.proj"] = glorot_uniform(rng, dims.vocab, h)
    width = h
    for l in range(dims.layers):
        for d in ("o", "r"):
            p[f"agn.{l}.w_key_{d}"] = glorot_uniform(rng, width, h)
            if config.aggregator == "agn4d":
                p[f"agn.{l}.p_src_{d}"] = glorot_uniform(rng, h, 1)
                p[f"agn.{l}.p_dst_{d}"] = glorot_uniform(rng, h, NUM_KINDS)
        if config.combine == "concat":
            width += h
    if task == "classify":
        p["cls.weight"] = glorot_uniform(rng, h, dims.classes)
        p["cls.bias"] = zeros((dims.classes,))
    else:
        p["clone.weight"] = glorot_uniform(rng, h, 1)
        p["clone.bias"] = zeros((1,))
    for name, t in p.items():
        t.name = name
    return p


def select_edges(batch: Batch, config: AblationConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if config.edges == "control":
        keep = batch.kind != DATAFLOW
    elif config.edges == "dataflow":
        keep = batch.kind == DATAFLOW
    else:
        keep = np.ones(len(batch.kind), dtype=bool)
    kind = batch.kind[keep]
    if config.edge_typing == "single":
        kind = np.zeros_like(kind)
    return batch.src[keep], batch.dst[keep], kind


def _num_layers(params: dict[str, Tensor]) -> int:
    return sum(1 for name in params if name.startswith("agn.") and name.endswith(".w_key_o"))


@dataclass
class ForwardTrace:
    layers: list[LayerOutput] = field(default_factory=list)
    local: Tensor | None = None
    contextual: Tensor | None = None


def forward_with_config(batch: Batch, params: dict[str, Tensor], config: AblationConfig = DEFAULT_CONFIG,
                        trace: ForwardTrace | None = None) -> Tensor:
    """Program vectors (one row per graph in the batch) under an ablation variant."""
    if config.block_repr == "ast":
        if "embedding" not in params:
            raise ConfigError("AST block representation needs TBCNN parameters")
        local = tbcnn_forward(batch.trees, batch.num_blocks, params["embedding"], params["tbcnn.w_top"],
                              params["tbcnn.w_left"], params["tbcnn.w_right"], params["tbcnn.bias"])
    else:
        if "bow.proj" not in params:
            raise ConfigError("bag-of-words block representation needs a projection matrix")
        local = bow_forward(batch.bow, params["bow.proj"])
    src, dst, kind = select_edges(batch, config)
    hidden = local
    contextual = Tensor(np.zeros(local.shape))
    for l in range(_num_layers(params)):
        layer = {k.split(".", 2)[2]: v for k, v in params.items() if k.startswith(f"agn.{l}.")}
        if config.aggregator == "agn4d" and "p_src_o" not in layer:
            raise ConfigError("attention aggregator needs attention parameters")
        out = agn4d_layer(hidden, src, dst, kind, layer, config.combine, config.aggregator)
        hidden, contextual = out.hidden, out.context
        if trace is not None:
            trace.layers.append(out)
    if trace is not None:
        trace.local, trace.contextual = local, contextual
    return fuse_and_pool(local, contextual, batch.block_graph, batch.num_graphs)


class Mfgnn:
    """Parameters plus configuration for one task."""

    def __init__(self, dims: Dims, config: AblationConfig = DEFAULT_CONFIG, task: str = "classify",
                 seed: int = 42, params: dict[str, Tensor] | None = None):
        self.dims = dims
        self.config = config
        self.task = task
        self.seed = seed
        self.params = params if params is not None else init_params(dims, config, task, seed)

    def program_vectors(self, batch: Batch, trace: ForwardTrace | None = None) -> Tensor:
        return forward_with_config(batch, self.params, self.config, trace)

    def logits(self, batch: Batch) -> Tensor:
        return class_logits(self.program_vectors(batch), self.params["cls.weight"], self.params["cls.bias"])

    def predict_proba(self, batch: Batch) -> np.ndarray:
        return F.softmax(self.logits(batch), axis=1).data

    def pair_logits(self, left: Batch, right: Batch) -> Tensor:
        return clone_logit(self.program_vectors(left), self.program_vectors(right),
                           self.params["clone.weight"], self.params["clone.bias"])

    def pair_scores(self, left: Batch, right: Batch) -> np.ndarray:
        return F.sigmoid(self.pair_logits(left, right)).data

    def meta(self) -> dict:
        return {
            "task": self.task, "seed": self.seed, "config": self.config.as_dict(),
            "dims": {"vocab": self.dims.vocab, "embed": self.dims.embed, "hidden": self.dims.hidden,
                     "layers": self.dims.layers, "classes": self.dims.classes},
        }

    @classmethod
    def from_checkpoint(cls, params: dict[str, Tensor], meta: dict) -> Mfgnn:
        return cls(Dims(**meta["dims"]), AblationConfig(**meta["config"]), meta["task"], meta["seed"], params)
