import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codegraph.errors import DataError, MetricError
from codegraph.mfgnn.config import DEFAULT_CONFIG, AblationConfig
from codegraph.train import (Entry, GraphCache, TrainConfig, accuracy, auc, compute_metrics, f1_per_class,
                             format_table, load_manifest, macro_f1, parse_manifest, run_ablation, split_dataset,
                             train)
from codegraph.train.ablation import train_and_evaluate
from codegraph.train.metrics import precision_recall_f1
from codegraph.train.trainer import Encoder, evaluate_entries, load_model, save_model

from conftest import FIXTURES
from oracles import brute_auc, brute_f1

SMALL = TrainConfig(epochs=3, embed=8, hidden=12, layers=2)


# -- splits ---------------------------------------------------------------------


@pytest.mark.parametrize("n, sizes", [(100, (60, 20, 20)), (5, (3, 1, 1)), (7, (4, 1, 2)), (50, (30, 10, 10))])
def test_split_sizes(n, sizes):
    parts = split_dataset(list(range(n)), seed=0)
    assert tuple(map(len, parts)) == sizes


def test_split_needs_five():
    with pytest.raises(DataError):
        split_dataset([1, 2, 3, 4])


def test_split_determinism_and_cover():
    items = list(range(50))
    for seed in range(1000):
        a = split_dataset(items, seed)
        assert a == split_dataset(items, seed)
        flat = a[0] + a[1] + a[2]
        assert sorted(flat) == items


# -- metrics --------------------------------------------------------------------


def test_accuracy_examples():
    assert accuracy([1, 0, 1], [1, 0, 1]) == 1.0
    assert accuracy([0, 0], [1, 1]) == 0.0
    assert accuracy([1, 0, 1, 1], [1, 0, 1, 0]) == 0.75


def test_f1_examples():
    assert macro_f1([0, 1, 1], [0, 1, 1], 2) == 1.0
    f1 = f1_per_class([1, 1], [1, 0], 2)
    assert f1[0] == 0.0 and math.isclose(f1[1], 2 / 3)
    assert math.isclose(macro_f1([1, 1], [1, 0], 2), 1 / 3)
    assert math.isclose(macro_f1([1, 1, 1, 1], [0, 1, 0, 1], 2), 1 / 3)


def test_absent_class_contributes_zero():
    assert f1_per_class([0, 1], [0, 1], 3) == [1.0, 1.0, 0.0]


def test_auc_examples():
    assert auc([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0
    assert auc([0.3, 0.3, 0.3, 0.3], [1, 0, 1, 0]) == 0.5
    assert auc([0.7, 0.7, 0.2], [1, 0, 0]) == 0.75
    with pytest.raises(MetricError):
        auc([0.1, 0.2], [1, 1])


def test_metric_length_mismatch():
    with pytest.raises(MetricError):
        accuracy([1], [1, 0])


def test_metrics_against_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n, k = int(rng.integers(1, 40)), int(rng.integers(2, 5))
        labels, preds = rng.integers(0, k, n), rng.integers(0, k, n)
        m = compute_metrics(preds, labels, k)
        assert m.accuracy == sum(int(p == y) for p, y in zip(preds, labels)) / n
        for c in range(k):
            assert math.isclose(m.f1[c], brute_f1(preds, labels, c), abs_tol=1e-12)
        assert math.isclose(m.macro_f1, sum(m.f1) / k, abs_tol=1e-12)
        # accuracy is the frequency-weighted mean of per-class recall
        freq = np.bincount(labels, minlength=k) / n
        assert math.isclose(m.accuracy, float(np.dot(freq, m.recall)), abs_tol=1e-12)
        for v in [m.accuracy, m.macro_f1, *m.precision, *m.recall, *m.f1]:
            assert 0.0 <= v <= 1.0


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 1)), min_size=2, max_size=40))
def test_auc_matches_pair_count(pairs):
    scores = [s / 20 for s, _ in pairs]
    labels = [y for _, y in pairs]
    if len(set(labels)) < 2:
        return
    assert math.isclose(auc(scores, labels), brute_auc(scores, labels), abs_tol=1e-12)
    for transform in (lambda x: x ** 3, lambda x: math.exp(5 * x), lambda x: 2 * x - 7):
        assert math.isclose(auc([transform(s) for s in scores], labels), auc(scores, labels), abs_tol=1e-12)


def test_binary_metrics_include_auc():
    m = compute_metrics([1, 0, 1], [1, 0, 0], 2, [0.9, 0.1, 0.6])
    assert m.auc == 1.0
    assert compute_metrics([1, 1], [1, 1], 2, [0.9, 0.8]).auc is None
    assert compute_metrics([0, 2], [0, 2], 3, [0.9, 0.8]).auc is None
    assert set(m.to_dict()) == {"accuracy", "precision", "recall", "f1", "macro_f1", "auc"}


# -- manifests ------------------------------------------------------------------


def test_load_manifests():
    classify = load_manifest(FIXTURES / "classify.jsonl")
    assert classify.task == "classify" and len(classify) == 20 and classify.num_classes == 2
    clone = load_manifest(FIXTURES / "clone.jsonl")
    assert clone.task == "clone" and len(clone) == 30
    assert all(len(e.paths) == 2 for e in clone.entries)


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    '{"path": "classify/const_00.mini"}',
    '{"path": "classify/missing.mini", "label": 0}',
    '{"path": "classify/const_00.mini", "label": -1}',
    '{"path": "classify/const_00.mini", "label": true}',
    '{"path": "classify/const_00.mini", "label": 0}\n{"path": "classify/const_00.mini", "label": 1}',
    '{"path": "classify/const_00.mini", "label": 0}\n{"a": "clone/prog_00.mini", "b": "clone/prog_01.mini", "label": 0}',
    '{"a": "clone/prog_00.mini", "b": "clone/nope.mini", "label": 0}',
    '{"a": "clone/prog_00.mini", "b": "clone/prog_01.mini", "label": 2}',
])
def test_manifest_errors(text):
    with pytest.raises(DataError):
        parse_manifest(text, FIXTURES)


def test_missing_manifest():
    with pytest.raises(DataError):
        load_manifest(FIXTURES / "absent.jsonl")


def test_unparsable_source_is_data_error(tmp_path):
    (tmp_path / "bad.mini").write_text("int f( {")
    cache = GraphCache()
    with pytest.raises(DataError):
        cache.get(tmp_path / "bad.mini")


# -- training -------------------------------------------------------------------


@pytest.fixture(scope="module")
def classify_split():
    return split_dataset(load_manifest(FIXTURES / "classify.jsonl").entries, 42)


def test_zero_learning_rate_keeps_initial_parameters(classify_split):
    train_set, val_set, _ = classify_split
    cfg = replace(SMALL, lr=0.0)
    result = train(train_set, val_set, cfg)
    fresh = train(train_set, val_set, replace(cfg, epochs=0))
    assert result.best_epoch == 1
    for name, p in result.model.params.items():
        assert np.array_equal(p.data, fresh.model.params[name].data)


def test_training_is_deterministic(classify_split):
    train_set, val_set, _ = classify_split
    a = train(train_set, val_set, SMALL)
    b = train(train_set, val_set, SMALL)
    assert a.best_epoch == b.best_epoch
    assert [h.loss for h in a.history] == [h.loss for h in b.history]
    for name in a.model.params:
        assert a.model.params[name].data.tobytes() == b.model.params[name].data.tobytes()


def test_best_epoch_parameters_are_returned(classify_split):
    train_set, val_set, _ = classify_split
    result = train(train_set, val_set, replace(SMALL, epochs=6))
    best = max(h.val_metric for h in result.history)
    assert result.history[result.best_epoch - 1].val_metric == best
    assert all(h.val_metric < best for h in result.history[:result.best_epoch - 1])
    metric = evaluate_entries(result.model, Encoder(result.vocab, GraphCache()), val_set).accuracy
    assert metric == best


def test_single_class_training():
    entries = [e for e in load_manifest(FIXTURES / "classify.jsonl").entries if e.label == 1]
    result = train(entries[:6], entries[6:], replace(SMALL, epochs=5), num_classes=2)
    metrics = evaluate_entries(result.model, Encoder(result.vocab, GraphCache()), entries[6:])
    assert metrics.accuracy == 1.0


def test_checkpoint_reproduces_metrics(classify_split, tmp_path):
    train_set, val_set, test_set = classify_split
    result, metrics = train_and_evaluate(train_set, val_set, test_set, SMALL)
    save_model(tmp_path / "m.json", result.model, result.vocab)
    model, vocab = load_model(tmp_path / "m.json")
    again = evaluate_entries(model, Encoder(vocab, GraphCache()), test_set)
    assert again == metrics
    for name, p in result.model.params.items():
        assert p.data.tobytes() == model.params[name].data.tobytes()


def test_ablation_rows(classify_split):
    train_set, val_set, test_set = classify_split
    assert run_ablation({}, train_set, val_set, test_set, SMALL) == []
    assert format_table([]) == "Setting     Acc      F1\n"
    rows = run_ablation({"A+C+D+M": DEFAULT_CONFIG, "GCN": AblationConfig(aggregator="gcn")},
                        train_set, val_set, test_set, SMALL)
    _, standalone = train_and_evaluate(train_set, val_set, test_set, SMALL)
    assert rows[0].metrics == standalone
    table = format_table(rows)
    assert table.splitlines()[1].startswith("A+C+D+M") and table.splitlines()[2].startswith("GCN")


def test_bow_cannot_separate_equal_label_multisets():
    entries = [Entry(((FIXTURES / "bow" / "sub_ab.mini").resolve(),), 0),
               Entry(((FIXTURES / "bow" / "sub_ba.mini").resolve(),), 1)]
    cfg = replace(SMALL, epochs=20, ablation=AblationConfig(block_repr="bow"))
    result = train(entries, [], cfg)
    enc = Encoder(result.vocab, GraphCache())
    probs = [result.model.predict_proba(enc.batch([e]))[0] for e in entries]
    assert np.array_equal(probs[0], probs[1])
    assert evaluate_entries(result.model, enc, entries).accuracy == 0.5


def test_clone_scores_are_symmetric():
    entries = load_manifest(FIXTURES / "clone.jsonl").entries
    result = train(entries[:10], [], replace(SMALL, epochs=2))
    enc = Encoder(result.vocab, GraphCache())
    swapped = [Entry((e.paths[1], e.paths[0]), e.label) for e in entries]
    fwd = result.model.pair_scores(enc.batch(entries, 0), enc.batch(entries, 1))
    rev = result.model.pair_scores(enc.batch(swapped, 0), enc.batch(swapped, 1))
    assert np.array_equal(fwd, rev)
