"""Training loop with best-validation selection, and evaluation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from codegraph.codemodel.vocab import Vocabulary, build_vocab
from codegraph.errors import DataError
from codegraph.mfgnn.config import DEFAULT_CONFIG, AblationConfig
from codegraph.mfgnn.encode import EncodedGraph, encode_graph, make_batch
from codegraph.mfgnn.model import Dims, Mfgnn
from codegraph.tensor import F, Tape, Tensor, backward
from codegraph.tensor.checkpoint import load_checkpoint, save_checkpoint
from codegraph.tensor.optim import AdamaxState, adamax_step
from codegraph.train.data import Entry, GraphCache
from codegraph.train.metrics import Metrics, compute_metrics

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    lr: float = 0.002
    seed: int = 42
    embed: int = 50
    hidden: int = 200
    layers: int = 3
    ablation: AblationConfig = DEFAULT_CONFIG
    # stop once the training metric reaches this value (None: run all epochs)
    stop_at_train: float | None = None


@dataclass
class EpochStats:
    epoch: int
    loss: float
    train_metric: float
    val_metric: float


@dataclass
class TrainResult:
    model: Mfgnn
    vocab: Vocabulary
    best_epoch: int
    history: list[EpochStats] = field(default_factory=list)


class Encoder:
    """Encodes manifest entries against one vocabulary, caching per file."""

    def __init__(self, vocab: Vocabulary, cache: GraphCache):
        self.vocab = vocab
        self.cache = cache
        self._encoded: dict = {}

    def graph(self, path) -> EncodedGraph:
        enc = self._encoded.get(path)
        if enc is None:
            enc = encode_graph(self.cache.get(path), self.vocab)
            self._encoded[path] = enc
        return enc

    def batch(self, entries: Sequence[Entry], side: int = 0):
        graphs = []
        for e in entries:
            g = self.graph(e.paths[side])
            graphs.append(EncodedGraph(g.trees, g.num_blocks, g.src, g.dst, g.kind, e.label, g.bow))
        return make_batch(graphs)


def _task(entries: Sequence[Entry]) -> str:
    return "clone" if entries and len(entries[0].paths) == 2 else "classify"


def corpus_vocab(entries: Sequence[Entry], cache: GraphCache) -> Vocabulary:
    blocks = [b for e in entries for p in e.paths for b in cache.get(p).blocks]
    return build_vocab(blocks)


def _loss(model: Mfgnn, enc: Encoder, entries: Sequence[Entry]) -> Tensor:
    labels = np.array([e.label for e in entries])
    if model.task == "clone":
        return F.bce_with_logits(model.pair_logits(enc.batch(entries, 0), enc.batch(entries, 1)), labels)
    return F.cross_entropy_with_logits(model.logits(enc.batch(entries)), labels)


def predict(model: Mfgnn, enc: Encoder, entries: Sequence[Entry], batch_size: int = 32):
    """(predicted labels, positive-class scores) in entry order."""
    preds, scores = [], []
    for start in range(0, len(entries), batch_size):
        chunk = entries[start:start + batch_size]
        if model.task == "clone":
            s = model.pair_scores(enc.batch(chunk, 0), enc.batch(chunk, 1))
            preds.append((s >= 0.5).astype(np.int64))
            scores.append(s)
        else:
            probs = model.predict_proba(enc.batch(chunk))
            preds.append(np.argmax(probs, axis=1))
            scores.append(probs[:, 1] if probs.shape[1] == 2 else probs.max(axis=1))
    if not preds:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(preds), np.concatenate(scores)


def evaluate_entries(model: Mfgnn, enc: Encoder, entries: Sequence[Entry], batch_size: int = 32) -> Metrics:
    if not entries:
        raise DataError("cannot evaluate an empty set")
    preds, scores = predict(model, enc, entries, batch_size)
    labels = np.array([e.label for e in entries])
    return compute_metrics(preds, labels, model.dims.classes, scores)


def headline(metrics: Metrics, task: str) -> float:
    """Selection metric: accuracy for classification, positive-class F1 for clones."""
    return metrics.f1[1] if task == "clone" else metrics.accuracy


def train(train_set: Sequence[Entry], val_set: Sequence[Entry], cfg: TrainConfig = TrainConfig(),
          cache: GraphCache | None = None, num_classes: int | None = None) -> TrainResult:
    """Adamax training that keeps the parameters of the best validation epoch.

    The vocabulary is built from the training split only. Ties in the
    validation metric keep the earliest epoch. Without a validation split the
    training metric is used.
    """
    if not train_set:
        raise DataError("empty training set")
    cache = cache or GraphCache()
    task = _task(train_set)
    vocab = corpus_vocab(train_set, cache)
    if num_classes is None:
        num_classes = 2 if task == "clone" else max(2, max(e.label for e in list(train_set) + list(val_set)) + 1)
    dims = Dims(len(vocab), cfg.embed, cfg.hidden, cfg.layers, num_classes)
    model = Mfgnn(dims, cfg.ablation, task, cfg.seed)
    enc = Encoder(vocab, cache)
    state = AdamaxState(lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    best_score, best_epoch = -1.0, 0
    best_params = {k: v.data.copy() for k, v in model.params.items()}
    history: list[EpochStats] = []
    train_list = list(train_set)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_list))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            chunk = [train_list[i] for i in order[start:start + cfg.batch_size]]
            with Tape() as tape:
                loss = _loss(model, enc, chunk)
            backward(tape, loss)
            adamax_step(model.params, None, state)
            total += loss.item() * len(chunk)
        train_metric = headline(evaluate_entries(model, enc, train_list, cfg.batch_size), task)
        val_metric = headline(evaluate_entries(model, enc, val_set, cfg.batch_size), task) if val_set else train_metric
        history.append(EpochStats(epoch, total / len(train_list), train_metric, val_metric))
        log.info("epoch %d loss %.4f train %.4f val %.4f", epoch, total / len(train_list), train_metric, val_metric)
        if val_metric > best_score:
            best_score, best_epoch = val_metric, epoch
            best_params = {k: v.data.copy() for k, v in model.params.items()}
        if cfg.stop_at_train is not None and train_metric >= cfg.stop_at_train:
            break
    for name, t in model.params.items():
        t.data = best_params[name]
        t.grad = None
    return TrainResult(model, vocab, best_epoch, history)


def save_model(path, model: Mfgnn, vocab: Vocabulary, extra: dict | None = None) -> None:
    meta = model.meta()
    meta["vocab"] = vocab.tokens[1:]
    if extra:
        meta["extra"] = extra
    save_checkpoint(path, model.params, meta)


def load_model(path) -> tuple[Mfgnn, Vocabulary]:
    params, meta = load_checkpoint(path)
    vocab = Vocabulary(meta["vocab"], frozen=True)
    return Mfgnn.from_checkpoint(params, meta), vocab
