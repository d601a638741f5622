"""Command-line entry point: ``codegraph {graph,train,eval,clone,gradcheck,ablate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from codegraph.codemodel.graph import analyze, serialize
from codegraph.errors import CodeGraphError, ConfigError, DataError, FormatError, SourceError
from codegraph.ir.tac import TacKind
from codegraph.mfgnn.config import DEFAULT_CONFIG, TABLE_VARIANTS, load_config
from codegraph.train.ablation import format_table, run_ablation, train_and_evaluate
from codegraph.train.data import GraphCache, load_manifest, split_dataset
from codegraph.train.trainer import Encoder, TrainConfig, evaluate_entries, load_model, save_model

EXIT_FAIL = 1
EXIT_INPUT = 2

log = logging.getLogger("codegraph")


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _train_config(args) -> TrainConfig:
    ablation = load_config(args.config) if args.config else DEFAULT_CONFIG
    return TrainConfig(epochs=args.epochs, seed=args.seed, embed=args.embed, hidden=args.hidden,
                       layers=args.layers, ablation=ablation)


def _config_echo(cfg: TrainConfig) -> dict:
    echo = asdict(cfg)
    echo["ablation"] = cfg.ablation.as_dict()
    echo.pop("stop_at_train")
    return echo


def _load_split(args, task: str | None = None):
    manifest = load_manifest(args.manifest)
    if task is not None and manifest.task != task:
        raise DataError(f"{args.manifest}: expected a {task} manifest, found {manifest.task} entries")
    train_set, val_set, test_set = split_dataset(manifest.entries, args.seed)
    return manifest, train_set, val_set, test_set


# -- commands ------------------------------------------------------------------

def cmd_graph(args) -> int:
    out_dir = Path(args.out)
    summary = {"files": [], "totals": {}}
    stats = []
    for name in args.inputs:
        path = Path(name)
        try:
            result = analyze(path.read_text(encoding="utf-8"), str(path))
        except OSError as exc:
            print(f"{path}: error: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
        graph = result.graph
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / (path.stem + ".json")).write_bytes(serialize(graph))
        row = {
            "file": str(path),
            "blocks": graph.block_count,
            "edges": dict(graph.edge_counts()),
            "branches": sum(1 for f in result.tac for i in f.items
                            if getattr(i, "kind", None) in (TacKind.BRANCH, TacKind.SWITCH)),
            "operators": sum(1 for n in result.program.walk() if n.kind in ("Unary", "Binary")),
        }
        stats.append(row)
        print(f"{path}: {row['blocks']} blocks, " + ", ".join(f"{k} {v}" for k, v in row["edges"].items() if v))
    summary["files"] = stats
    if stats:
        n = len(stats)
        summary["totals"] = {
            "files": n,
            "avg_blocks": sum(r["blocks"] for r in stats) / n,
            "avg_branches": sum(r["branches"] for r in stats) / n,
            "avg_operators": sum(r["operators"] for r in stats) / n,
        }
    _write_json(out_dir / "summary.json", summary)
    return 0


def _train_command(args, task: str | None) -> int:
    cfg = _train_config(args)
    manifest, train_set, val_set, test_set = _load_split(args, task)
    cache = GraphCache()
    result, metrics = train_and_evaluate(train_set, val_set, test_set, cfg, cache, manifest.num_classes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / "model.json", result.model, result.vocab, {"train": _config_echo(cfg)})
    report = {**metrics.to_dict(), "task": manifest.task, "best_epoch": result.best_epoch,
              "config": _config_echo(cfg), "seed": cfg.seed}
    _write_json(out / "metrics.json", report)
    print(f"{manifest.task}: best epoch {result.best_epoch}, test accuracy {metrics.accuracy:.4f}, "
          f"macro-F1 {metrics.macro_f1:.4f}")
    if manifest.task == "clone":
        print(f"clone P {metrics.precision[1]:.4f} R {metrics.recall[1]:.4f} F1 {metrics.f1[1]:.4f}")
    return 0


def cmd_train(args) -> int:
    return _train_command(args, None)


def cmd_clone(args) -> int:
    return _train_command(args, "clone")


def cmd_eval(args) -> int:
    model, vocab = load_model(args.checkpoint)
    manifest = load_manifest(args.manifest)
    if args.split == "all":
        entries = manifest.entries
    else:
        entries = dict(zip(("train", "val", "test"), split_dataset(manifest.entries, args.seed)))[args.split]
    metrics = evaluate_entries(model, Encoder(vocab, GraphCache()), entries)
    report = {**metrics.to_dict(), "task": model.task, "split": args.split,
              "config": {"ablation": model.config.as_dict()}, "seed": args.seed}
    if args.out:
        _write_json(Path(args.out), report)
    print(f"{args.split}: accuracy {metrics.accuracy:.4f}, macro-F1 {metrics.macro_f1:.4f}")
    return 0


def cmd_gradcheck(args) -> int:
    from codegraph.mfgnn.gradsuite import TOLERANCE, gradient_report

    rows = gradient_report(args.seed)
    width = max(len(r.layer) for r in rows)
    for r in rows:
        print(f"{r.layer:<{width}}  params {r.params:4d}  max rel err {r.error:.2e}  {'ok' if r.ok else 'FAIL'}")
    if args.out:
        _write_json(Path(args.out), {"seed": args.seed, "tolerance": TOLERANCE,
                                     "rows": [{"layer": r.layer, "error": float(r.error), "ok": r.ok} for r in rows]})
    return 0 if all(r.ok for r in rows) else EXIT_FAIL


def cmd_ablate(args) -> int:
    cfg = _train_config(args)
    manifest, train_set, val_set, test_set = _load_split(args)
    configs = {}
    for name in args.variant or []:
        if name not in TABLE_VARIANTS:
            raise ConfigError(f"unknown variant {name!r}; choose from {', '.join(TABLE_VARIANTS)}")
        configs[name] = TABLE_VARIANTS[name]
    for path in args.variant_config or []:
        configs[Path(path).stem] = load_config(path)
    if not args.variant and not args.variant_config:
        configs = dict(TABLE_VARIANTS)
    rows = run_ablation(configs, train_set, val_set, test_set, cfg, manifest.num_classes)
    table = format_table(rows)
    print(table, end="")
    out = Path(args.out)
    _write_json(out / "ablation.json", {
        "seed": cfg.seed, "config": _config_echo(cfg),
        "rows": [{"name": r.name, "ablation": r.config.as_dict(), "best_epoch": r.best_epoch,
                  **r.metrics.to_dict()} for r in rows],
    })
    (out / "ablation.txt").write_text(table, encoding="utf-8")
    return 0


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codegraph", description="Program graphs and graph-network training.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-epoch progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        if manifest:
            p.add_argument("manifest", help="JSON-lines dataset manifest")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--epochs", type=int, default=200)
        p.add_argument("--hidden", type=int, default=200)
        p.add_argument("--embed", type=int, default=50)
        p.add_argument("--layers", type=int, default=3)
        p.add_argument("--config", help="ablation config file (key=value lines)")

    p = sub.add_parser("graph", help="build CodeGraph JSON files from MiniLang sources")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--out", default="graphs")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("train", help="train and evaluate on a manifest's 3:1:1 split")
    common(p)
    p.add_argument("--out", default="run")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("clone", help="train the clone detector on a pair manifest")
    common(p)
    p.add_argument("--out", default="run")
    p.set_defaults(func=cmd_clone)

    p = sub.add_parser("eval", help="evaluate a saved checkpoint")
    p.add_argument("manifest")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--split", choices=("train", "val", "test", "all"), default="test")
    p.add_argument("--out", help="metrics JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference check of every layer type")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("ablate", help="train every ablation variant and print the comparison table")
    common(p)
    p.add_argument("--variant", action="append", help=f"one of {', '.join(TABLE_VARIANTS)} (repeatable)")
    p.add_argument("--variant-config", action="append", help="extra variant from a config file (repeatable)")
    p.add_argument("--out", default="ablation")
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except SourceError as exc:
        print(exc.diagnostic(), file=sys.stderr)
        return EXIT_FAIL
    except (DataError, ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CodeGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
