"""Manifests, dataset splits and source-to-graph loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from codegraph.codemodel.graph import CodeGraph, build_code_graph
from codegraph.errors import CodeGraphError, DataError, SourceError


@dataclass(frozen=True)
class Entry:
    paths: tuple[Path, ...]      # one path for classify, two for clone
    label: int


@dataclass
class DatasetManifest:
    task: str                    # "classify" or "clone"
    entries: list[Entry]
    root: Path = Path(".")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def num_classes(self) -> int:
        if self.task == "clone":
            return 2
        return max(2, max((e.label for e in self.entries), default=0) + 1)


def _int_label(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise DataError(f"{where}: label must be a non-negative integer, got {value!r}")
    return value


def parse_manifest(text: str, root: Path = Path("."), source: str = "<manifest>") -> DatasetManifest:
    """Read JSON lines of ``{"path", "label"}`` or ``{"a", "b", "label"}`` entries.

    Relative paths resolve against ``root``.
    """
    entries: list[Entry] = []
    task = None
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise DataError(f"{where}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise DataError(f"{where}: entry must be an object")
        if set(obj) == {"path", "label"}:
            kind, names = "classify", [obj["path"]]
        elif set(obj) == {"a", "b", "label"}:
            kind, names = "clone", [obj["a"], obj["b"]]
        else:
            raise DataError(f"{where}: expected keys path/label or a/b/label, got {sorted(obj)}")
        if task is None:
            task = kind
        elif task != kind:
            raise DataError(f"{where}: mixes classification and clone entries")
        label = _int_label(obj["label"], where)
        if kind == "clone" and label not in (0, 1):
            raise DataError(f"{where}: clone labels must be 0 or 1")
        paths = []
        for name in names:
            if not isinstance(name, str):
                raise DataError(f"{where}: paths must be strings")
            p = (root / name).resolve()
            if not p.is_file():
                raise DataError(f"{where}: no such file {name}")
            paths.append(p)
        entry = Entry(tuple(paths), label)
        if entry.paths in seen:
            raise DataError(f"{where}: duplicate entry")
        seen.add(entry.paths)
        entries.append(entry)
    return DatasetManifest(task or "classify", entries, root)


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc.strerror}") from exc
    return parse_manifest(text, path.parent, str(path))


def split_dataset(items: Sequence, seed: int = 42) -> tuple[list, list, list]:
    """Shuffle with ``seed`` and cut 60% / 20% / rest."""
    n = len(items)
    if n < 5:
        raise DataError(f"need at least 5 entries to split, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    n_train, n_val = int(np.floor(0.6 * n)), int(np.floor(0.2 * n))
    pick = lambda idx: [items[i] for i in idx]
    return pick(order[:n_train]), pick(order[n_train:n_train + n_val]), pick(order[n_train + n_val:])


@dataclass
class GraphCache:
    """Builds each source file's CodeGraph once."""

    graphs: dict[Path, CodeGraph] = field(default_factory=dict)

    def get(self, path: Path) -> CodeGraph:
        graph = self.graphs.get(path)
        if graph is None:
            try:
                graph = build_code_graph(path.read_text(encoding="utf-8"), str(path))
                graph.validate()
            except SourceError as exc:
                raise DataError(exc.diagnostic()) from exc
            except CodeGraphError as exc:
                raise DataError(f"{path}: {exc}") from exc
            except OSError as exc:
                raise DataError(f"cannot read {path}: {exc.strerror}") from exc
            self.graphs[path] = graph
        return graph
