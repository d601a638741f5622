"""Train and evaluate several ablation variants under one seed."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from codegraph.mfgnn.config import AblationConfig
from codegraph.train.data import Entry, GraphCache
from codegraph.train.metrics import Metrics
from codegraph.train.trainer import Encoder, TrainConfig, evaluate_entries, train


@dataclass
class AblationRow:
    name: str
    config: AblationConfig
    metrics: Metrics
    best_epoch: int


def train_and_evaluate(train_set, val_set, test_set, cfg: TrainConfig, cache: GraphCache | None = None,
                       num_classes: int | None = None):
    cache = cache or GraphCache()
    result = train(train_set, val_set, cfg, cache, num_classes)
    metrics = evaluate_entries(result.model, Encoder(result.vocab, cache), test_set, cfg.batch_size)
    return result, metrics


def run_ablation(configs: Mapping[str, AblationConfig], train_set: Sequence[Entry], val_set: Sequence[Entry],
                 test_set: Sequence[Entry], cfg: TrainConfig, num_classes: int | None = None) -> list[AblationRow]:
    cache = GraphCache()
    rows = []
    for name, config in configs.items():
        result, metrics = train_and_evaluate(train_set, val_set, test_set, replace(cfg, ablation=config), cache,
                                             num_classes)
        rows.append(AblationRow(name, config, metrics, result.best_epoch))
    return rows


def format_table(rows: Sequence[AblationRow]) -> str:
    """Text table with one row per setting and accuracy / macro-F1 in percent."""
    width = max([len("Setting")] + [len(r.name) for r in rows])
    lines = [f"{'Setting':<{width}}  {'Acc':>6}  {'F1':>6}"]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {100 * r.metrics.accuracy:6.1f}  {100 * r.metrics.macro_f1:6.1f}")
    return "\n".join(lines) + "\n"
