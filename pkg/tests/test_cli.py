import json
import subprocess
import sys

import pytest

from codegraph.cli import main

from conftest import FIXTURES

SMALL = ["--epochs", "3", "--embed", "8", "--hidden", "12", "--layers", "2"]


def test_graph_stats(tmp_path, capsys):
    rc = main(["graph", str(FIXTURES / "null_return" / "fixed.mini"), str(FIXTURES / "cfg" / "switch.mini"),
               "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    fixed = summary["files"][0]
    assert fixed["blocks"] == 5
    assert fixed["edges"]["CondTrue"] == 1 and fixed["edges"]["CondFalse"] == 1
    assert fixed["edges"]["DataFlow"] >= 1
    assert fixed["branches"] == 1
    assert summary["files"][1]["edges"]["SwitchBranch"] == 4
    assert summary["totals"]["files"] == 2
    graph = json.loads((tmp_path / "fixed.json").read_text())
    assert graph["version"] == 1 and len(graph["blocks"]) == 5
    assert "5 blocks" in capsys.readouterr().out


def test_graph_without_inputs(tmp_path):
    assert main(["graph", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "summary.json").read_text()) == {"files": [], "totals": {}}


def test_graph_unparsable_file(tmp_path, capsys):
    bad = tmp_path / "bad.mini"
    bad.write_text("int f() {\n  return 1\n}\n")
    assert main(["graph", str(bad), "--out", str(tmp_path / "out")]) != 0
    err = capsys.readouterr().err
    assert err.startswith(f"{bad}:3:1: error:")


def test_graph_missing_file(tmp_path):
    assert main(["graph", str(tmp_path / "nope.mini"), "--out", str(tmp_path)]) == 2


def test_train_missing_manifest(tmp_path, capsys):
    assert main(["train", str(tmp_path / "absent.jsonl"), "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "variant.cfg"
    cfg.write_text("aggregator=ggnn\n")
    rc = main(["train", str(FIXTURES / "classify.jsonl"), "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 2


def test_train_then_eval(tmp_path):
    run = tmp_path / "run"
    assert main(["train", str(FIXTURES / "classify.jsonl"), *SMALL, "--out", str(run)]) == 0
    metrics = json.loads((run / "metrics.json").read_text())
    assert {"accuracy", "macro_f1", "f1", "auc", "seed", "config", "best_epoch"} <= set(metrics)
    assert metrics["seed"] == 42 and metrics["config"]["ablation"]["aggregator"] == "agn4d"
    out = tmp_path / "eval.json"
    assert main(["eval", str(FIXTURES / "classify.jsonl"), "--checkpoint", str(run / "model.json"),
                 "--out", str(out)]) == 0
    again = json.loads(out.read_text())
    for key in ("accuracy", "precision", "recall", "f1", "macro_f1", "auc"):
        assert again[key] == metrics[key]


def test_clone_command(tmp_path, capsys):
    assert main(["clone", str(FIXTURES / "clone.jsonl"), *SMALL, "--out", str(tmp_path)]) == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["task"] == "clone" and len(metrics["f1"]) == 2
    assert "clone P" in capsys.readouterr().out


def test_clone_rejects_classification_manifest(tmp_path):
    assert main(["clone", str(FIXTURES / "classify.jsonl"), *SMALL, "--out", str(tmp_path)]) == 2


def test_clone_pair_with_missing_file(tmp_path):
    manifest = tmp_path / "pairs.jsonl"
    lines = [json.dumps({"a": str(FIXTURES / "clone" / f"prog_0{i}.mini"),
                         "b": str(FIXTURES / "clone" / f"prog_0{i}.mini"), "label": 1}) for i in range(5)]
    lines.append(json.dumps({"a": str(FIXTURES / "clone" / "prog_00.mini"), "b": "gone.mini", "label": 0}))
    manifest.write_text("\n".join(lines) + "\n")
    assert main(["clone", str(manifest), *SMALL, "--out", str(tmp_path)]) == 2


def test_gradcheck_command(tmp_path, capsys):
    assert main(["gradcheck", "--out", str(tmp_path / "g.json")]) == 0
    rows = json.loads((tmp_path / "g.json").read_text())["rows"]
    assert len(rows) == 6 and all(r["ok"] for r in rows)
    assert len({r["layer"] for r in rows}) == 6
    assert len(capsys.readouterr().out.strip().splitlines()) == 6


def test_gradcheck_failure_exit(monkeypatch):
    import codegraph.mfgnn.gradsuite as suite

    monkeypatch.setattr(suite, "gradient_report", lambda seed: [suite.GradRow("fake", 1.0, 3)])
    assert main(["gradcheck"]) == 1


def test_ablate_command(tmp_path, capsys):
    rc = main(["ablate", str(FIXTURES / "classify.jsonl"), *SMALL, "--variant", "A+C+D+M", "--variant", "GCN",
               "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "ablation.json").read_text())
    assert [r["name"] for r in report["rows"]] == ["A+C+D+M", "GCN"]
    assert (tmp_path / "ablation.txt").read_text() == capsys.readouterr().out


def test_unknown_variant(tmp_path):
    assert main(["ablate", str(FIXTURES / "classify.jsonl"), "--variant", "XYZ", "--out", str(tmp_path)]) == 2


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "codegraph.cli", "graph", str(FIXTURES / "null_return" / "diamond.mini"),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and "5 blocks" in proc.stdout
