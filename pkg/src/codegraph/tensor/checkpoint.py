"""JSON checkpoints: name -> shape + row-major floats.

Floats are written with ``repr`` precision, so a save/load round trip is
bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from codegraph.errors import FormatError
from codegraph.tensor.core import Tensor

CHECKPOINT_VERSION = 1


def checkpoint_to_json(params: Mapping[str, Tensor], meta: dict | None = None) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "meta": meta or {},
        "params": {
            name: {"shape": list(t.shape), "data": t.data.reshape(-1).tolist()}
            for name, t in params.items()
        },
    }


def checkpoint_from_json(obj) -> tuple[dict[str, Tensor], dict]:
    if not isinstance(obj, dict) or obj.get("version") != CHECKPOINT_VERSION:
        raise FormatError("unsupported checkpoint version")
    if not isinstance(obj.get("params"), dict) or not isinstance(obj.get("meta", {}), dict):
        raise FormatError("checkpoint needs a 'params' object and an optional 'meta' object")
    params = {}
    for name, entry in obj["params"].items():
        if not isinstance(entry, dict) or set(entry) != {"shape", "data"}:
            raise FormatError(f"checkpoint entry {name}: expected 'shape' and 'data'")
        try:
            shape = tuple(int(d) for d in entry["shape"])
            data = np.asarray(entry["data"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"checkpoint entry {name}: {exc}") from exc
        if data.size != int(np.prod(shape, dtype=np.int64)):
            raise FormatError(f"checkpoint entry {name}: {data.size} values for shape {shape}")
        params[name] = Tensor(data.reshape(shape), requires_grad=True, name=name)
    return params, obj.get("meta", {})


def save_checkpoint(path: str | Path, params: Mapping[str, Tensor], meta: dict | None = None) -> None:
    Path(path).write_text(json.dumps(checkpoint_to_json(params, meta)), encoding="utf-8")


def load_checkpoint(path: str | Path) -> tuple[dict[str, Tensor], dict]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise FormatError(f"{path}: not a checkpoint: {exc}") from exc
    return checkpoint_from_json(obj)
