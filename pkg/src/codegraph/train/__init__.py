"""Datasets, training, evaluation metrics and the ablation driver."""

from codegraph.train.ablation import AblationRow, format_table, run_ablation, train_and_evaluate
from codegraph.train.data import DatasetManifest, Entry, GraphCache, load_manifest, parse_manifest, split_dataset
from codegraph.train.metrics import Metrics, accuracy, auc, compute_metrics, f1_per_class, macro_f1
from codegraph.train.trainer import (
    Encoder, TrainConfig, TrainResult, evaluate_entries, load_model, save_model, train,
)

__all__ = [
    "AblationRow", "DatasetManifest", "Encoder", "Entry", "GraphCache", "Metrics", "TrainConfig", "TrainResult",
    "accuracy", "auc", "compute_metrics", "evaluate_entries", "f1_per_class", "format_table", "load_manifest",
    "load_model", "macro_f1", "parse_manifest", "run_ablation", "save_model", "split_dataset", "train",
    "train_and_evaluate",
]
