"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line summary; the terminal summary lists them as
PASS/FAIL lines.
"""

import json
import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

from codegraph.cli import main
from codegraph.codemodel import build_code_graph, build_vocab, deserialize, serialize
from codegraph.dataflow import compute_def_use, reaching_definitions
from codegraph.mfgnn.config import AblationConfig
from codegraph.mfgnn.encode import encode_graph, make_batch, tbcnn_weights
from codegraph.mfgnn.gradsuite import TOLERANCE, gradient_report
from codegraph.mfgnn.layers import agn4d_layer, clone_score
from codegraph.mfgnn.model import NUM_KINDS, Dims, Mfgnn, init_params
from codegraph.tensor import Tensor
from codegraph.train import GraphCache, TrainConfig, accuracy, auc, load_manifest, macro_f1, split_dataset, train
from codegraph.train.metrics import f1_per_class
from codegraph.train.trainer import Encoder, evaluate_entries, load_model, save_model

from conftest import FIXTURES, corpus_sources, fixture_text
from oracles import brute_auc, brute_f1, explore_reaching, oracle_cases


def say(record_property, line: str) -> None:
    record_property("detail", line)
    print(line)


def test_criterion_01_gradient_suite(record_property):
    start = time.perf_counter()
    rows = gradient_report(seed=42, h=1e-5)
    elapsed = time.perf_counter() - start
    worst = max(r.error for r in rows)
    say(record_property, f"{len(rows)} layer checks, worst relative error {worst:.2e}, {elapsed:.1f}s")
    names = [r.layer for r in rows]
    assert any("tbcnn" in n for n in names) and sum("agn4d" in n for n in names) == 3
    assert any("classifier" in n for n in names) and any("clone" in n for n in names)
    assert all(r.error < TOLERANCE for r in rows) and TOLERANCE == 1e-4
    assert elapsed < 30


def test_criterion_02_depth_weights(record_property):
    cases = {(3, 5, 2, 3): (0.5, 0.25, 0.375), (1, 5, 1, 1): (0.0, 0.0, 0.0), (5, 5, 1, 2): (1.0, 0.0, 1.0)}
    got = {args: tbcnn_weights(*args) for args in cases}
    say(record_property, "; ".join(f"{a} -> {got[a]}" for a in cases))
    assert got == cases


def test_criterion_03_attention_normalization(record_property):
    rng = np.random.default_rng(2024)
    worst, checked = 0.0, 0
    for g in range(100):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(NUM_KINDS, 3 * n + NUM_KINDS))
        kind = np.concatenate([np.arange(NUM_KINDS), rng.integers(0, NUM_KINDS, m - NUM_KINDS)])
        src, dst = rng.integers(0, n, m), rng.integers(0, n, m)
        params = init_params(Dims(vocab=4, embed=8, hidden=32, layers=3), seed=g)
        h = Tensor(rng.normal(size=(n, 32)))
        for l in range(3):
            layer = {k.split(".", 2)[2]: v for k, v in params.items() if k.startswith(f"agn.{l}.")}
            out = agn4d_layer(h, src, dst, kind, layer)
            for alpha, group in ((out.alpha_o, src), (out.alpha_r, dst)):
                sums = np.bincount(group, weights=alpha, minlength=n)
                has = np.bincount(group, minlength=n) > 0
                worst = max(worst, float(np.abs(sums[has] - 1.0).max()))
                checked += int(has.sum())
            h = out.hidden
    say(record_property, f"{checked} attention groups over 100 graphs x 3 layers x 2 directions, "
                         f"max |sum-1| = {worst:.1e}")
    assert worst <= 1e-12


def test_criterion_04_dataflow_oracle(record_property):
    start = time.perf_counter()
    cases = mismatches = 0
    for cfg in oracle_cases(random_count=1000):
        du = compute_def_use(cfg)
        rs = reaching_definitions(cfg, du)
        reach, _ = explore_reaching(cfg)
        assert len(cfg.blocks) <= 6
        assert len({v for d in du for v, _ in d.define}) <= 3
        mismatches += any(set(rs.in_[b]) != sites for b, sites in reach.items())
        cases += 1
    elapsed = time.perf_counter() - start
    say(record_property, f"{cases} CFGs, {mismatches} mismatches, {elapsed:.1f}s")
    assert cases >= 200 and mismatches == 0 and elapsed < 60


def _vectors(graphs, config=AblationConfig(), seed=42):
    """Program vector of each graph, each run as its own batch."""
    vocab = build_vocab([b for g in graphs for b in g.blocks])
    model = Mfgnn(Dims(len(vocab)), config, seed=seed)
    return [model.program_vectors(make_batch([encode_graph(g, vocab)])).data[0] for g in graphs]


def test_criterion_05_discriminability(record_property):
    fixed, defect = (build_code_graph(fixture_text("null_return", n)) for n in ("fixed.mini", "defect.mini"))
    differing = [i for i, (a, b) in enumerate(zip(fixed.blocks, defect.blocks)) if a.root != b.root]
    v = _vectors([fixed, defect])
    gap = float(np.abs(v[0] - v[1]).max())
    ab, ba = (build_code_graph(fixture_text("bow", n)) for n in ("sub_ab.mini", "sub_ba.mini"))
    same_multisets = all(sorted(x.root.labels()) == sorted(y.root.labels()) for x, y in zip(ab.blocks, ba.blocks))
    bow = _vectors([ab, ba], AblationConfig(block_repr="bow"))
    ast = _vectors([ab, ba])
    say(record_property, f"differing blocks {differing}, AST L-inf gap {gap:.3e}, "
                         f"BoW gap {np.abs(bow[0] - bow[1]).max():.1e}, AST gap on BoW pair {np.abs(ast[0] - ast[1]).max():.1e}")
    assert fixed.block_count == defect.block_count and fixed.edges == defect.edges
    assert len(differing) == 1
    assert gap > 1e-6
    assert ab.edges == ba.edges and same_multisets
    assert np.array_equal(bow[0], bow[1])


def test_criterion_06_overfit_classifier(record_property):
    manifest = load_manifest(FIXTURES / "classify.jsonl")
    labels = [e.label for e in manifest.entries]
    start = time.perf_counter()
    result = train(manifest.entries, [], TrainConfig(stop_at_train=1.0))
    elapsed = time.perf_counter() - start
    final = result.history[-1]
    say(record_property, f"{len(labels)} programs, train accuracy {final.train_metric:.2f} "
                         f"at epoch {final.epoch}, {elapsed:.1f}s")
    assert len(labels) == 20 and sorted(set(labels)) == [0, 1]
    cfg = TrainConfig()
    assert (cfg.embed, cfg.hidden, cfg.layers, cfg.epochs) == (50, 200, 3, 200)
    assert final.train_metric == 1.0 and final.epoch <= 200
    assert elapsed < 300


def test_criterion_07_clone_sanity(record_property):
    manifest = load_manifest(FIXTURES / "clone.jsonl")
    result = train(manifest.entries, [], TrainConfig(stop_at_train=1.0))
    metrics = evaluate_entries(result.model, Encoder(result.vocab, GraphCache()), manifest.entries)
    rng = np.random.default_rng(7)
    w, b = Tensor(rng.normal(size=(200, 1))), Tensor(rng.normal(size=1))
    asymmetric = 0
    for _ in range(100):
        v1, v2 = Tensor(rng.normal(size=(1, 200))), Tensor(rng.normal(size=(1, 200)))
        asymmetric += clone_score(v1, v2, w, b).item() != clone_score(v2, v1, w, b).item()
    say(record_property, f"{len(manifest)} pairs, training F1 {metrics.f1[1]:.2f} at epoch "
                         f"{result.history[-1].epoch}, {asymmetric}/100 asymmetric scores")
    assert len(manifest) == 30
    assert metrics.f1[1] == 1.0 and asymmetric == 0


def test_criterion_08_metric_oracles(record_property):
    rng = np.random.default_rng(8)
    worst_auc = 0.0
    for i in range(1000):
        n, k = int(rng.integers(2, 60)), int(rng.integers(2, 6))
        labels, preds = rng.integers(0, k, n), rng.integers(0, k, n)
        assert accuracy(preds, labels) == sum(int(p == y) for p, y in zip(preds, labels)) / n
        f1 = f1_per_class(preds, labels, k)
        assert f1 == [brute_f1(preds, labels, c) for c in range(k)]
        assert macro_f1(preds, labels, k) == float(np.mean([brute_f1(preds, labels, c) for c in range(k)]))
        binary = rng.integers(0, 2, n)
        if 0 < binary.sum() < n:
            scores = np.round(rng.random(n), int(rng.integers(1, 4)))
            worst_auc = max(worst_auc, abs(auc(scores, binary) - brute_auc(scores, binary)))
    say(record_property, f"1000 vectors, accuracy and F1 exact, max AUC deviation {worst_auc:.1e}")
    assert worst_auc <= 1e-12


def test_criterion_09_round_trips(record_property, tmp_path):
    paths = corpus_sources()
    for p in paths:
        g = build_code_graph(p.read_text(), str(p), label=0)
        assert deserialize(serialize(g)) == g
    manifest = load_manifest(FIXTURES / "classify.jsonl")
    train_set, val_set, test_set = split_dataset(manifest.entries, 42)
    result = train(train_set, val_set, TrainConfig(epochs=5))
    before = evaluate_entries(result.model, Encoder(result.vocab, GraphCache()), test_set)
    save_model(tmp_path / "model.json", result.model, result.vocab)
    model, vocab = load_model(tmp_path / "model.json")
    after = evaluate_entries(model, Encoder(vocab, GraphCache()), test_set)
    say(record_property, f"{len(paths)} corpus graphs round-trip; checkpoint metrics identical: {before == after}")
    assert before == after
    assert json.dumps(before.to_dict()) == json.dumps(after.to_dict())


def test_criterion_10_ablation_driver(record_property, tmp_path, capsys):
    manifest = str(FIXTURES / "classify.jsonl")
    assert main(["ablate", manifest, "--variant", "A+C+D+M", "--variant", "A+C+S", "--variant", "A+D+S",
                 "--variant", "A+C+M", "--out", str(tmp_path / "ablate")]) == 0
    table = capsys.readouterr().out
    assert main(["train", manifest, "--out", str(tmp_path / "run")]) == 0
    assert main(["eval", manifest, "--checkpoint", str(tmp_path / "run" / "model.json"),
                 "--out", str(tmp_path / "eval.json")]) == 0
    rows = json.loads((tmp_path / "ablate" / "ablation.json").read_text())["rows"]
    default = next(r for r in rows if r["name"] == "A+C+D+M")
    trained = json.loads((tmp_path / "run" / "metrics.json").read_text())
    evaluated = json.loads((tmp_path / "eval.json").read_text())
    keys = ("accuracy", "precision", "recall", "f1", "macro_f1", "auc")
    identical = all(default[k] == trained[k] == evaluated[k] for k in keys)
    lines = table.strip().splitlines()
    say(record_property, f"{len(rows)} rows, default row identical to train+eval: {identical}; "
                         f"table header {lines[0].split()}")
    assert identical
    assert lines[0].split() == ["Setting", "Acc", "F1"]
    assert [l.split()[0] for l in lines[1:]] == ["A+C+D+M", "A+C+S", "A+D+S", "A+C+M"]
