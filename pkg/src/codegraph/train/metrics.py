"""Classification metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from codegraph.errors import MetricError


def accuracy(preds, labels) -> float:
    preds, labels = np.asarray(preds), np.asarray(labels)
    if preds.shape != labels.shape:
        raise MetricError(f"{preds.shape[0]} predictions for {labels.shape[0]} labels")
    if labels.size == 0:
        raise MetricError("accuracy of an empty set")
    return float(np.mean(preds == labels))


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def precision_recall_f1(preds, labels, num_classes: int) -> tuple[list[float], list[float], list[float]]:
    """Per-class precision, recall and F1; empty ratios count as 0."""
    if num_classes < 2:
        raise MetricError("need at least two classes")
    preds, labels = np.asarray(preds), np.asarray(labels)
    precision, recall, f1 = [], [], []
    for k in range(num_classes):
        tp = int(np.sum((preds == k) & (labels == k)))
        fp = int(np.sum((preds == k) & (labels != k)))
        fn = int(np.sum((preds != k) & (labels == k)))
        p, r = _safe_div(tp, tp + fp), _safe_div(tp, tp + fn)
        precision.append(p)
        recall.append(r)
        f1.append(_safe_div(2 * p * r, p + r))
    return precision, recall, f1


def f1_per_class(preds, labels, num_classes: int) -> list[float]:
    return precision_recall_f1(preds, labels, num_classes)[2]


def macro_f1(preds, labels, num_classes: int) -> float:
    return float(np.mean(f1_per_class(preds, labels, num_classes)))


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative (ties count half)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos, neg = scores[labels == 1], scores[labels != 1]
    if pos.size == 0 or neg.size == 0:
        raise MetricError("AUC needs at least one positive and one negative sample")
    neg_sorted = np.sort(neg)
    below = np.searchsorted(neg_sorted, pos, side="left")
    ties = np.searchsorted(neg_sorted, pos, side="right") - below
    return float((below.sum() + 0.5 * ties.sum()) / (pos.size * neg.size))


@dataclass
class Metrics:
    accuracy: float
    precision: list[float]
    recall: list[float]
    f1: list[float]
    macro_f1: float
    auc: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def compute_metrics(preds, labels, num_classes: int, scores=None) -> Metrics:
    """All metrics at once. ``scores`` (positive-class scores) enables AUC for binary tasks."""
    precision, recall, f1 = precision_recall_f1(preds, labels, num_classes)
    area = None
    if scores is not None and num_classes == 2:
        try:
            area = auc(scores, labels)
        except MetricError:
            area = None
    return Metrics(accuracy(preds, labels), precision, recall, f1, float(np.mean(f1)), area)
