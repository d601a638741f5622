"""Dense float64 tensors with a tape-based reverse-mode differentiator.

Operations record themselves on the active :class:`Tape` (a computation
record) when any input requires a gradient. :func:`backward` walks the tape
in reverse and writes d(loss)/d(leaf) into each leaf's ``grad`` slot.

    with Tape() as tape:
        loss = F.sum(F.matmul(x, w))
    backward(tape, loss)
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from codegraph.errors import ShapeError

_ACTIVE: contextvars.ContextVar[Tape | None] = contextvars.ContextVar("codegraph_tape", default=None)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"Tensor{tag}(shape={self.shape}, requires_grad={self.requires_grad})"

    # operator sugar
    def __add__(self, other): return add(self, _wrap(other))
    def __radd__(self, other): return add(_wrap(other), self)
    def __sub__(self, other): return sub(self, _wrap(other))
    def __mul__(self, other): return mul(self, _wrap(other))
    def __rmul__(self, other): return mul(_wrap(other), self)
    def __matmul__(self, other): return matmul(self, other)
    def __neg__(self): return scale(self, -1.0)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


@dataclass(eq=False)
class OpRecord:
    name: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tape:
    """Ordered record of primitive-op applications.

    Entries are appended as ops execute, so the sequence is already in
    topological order and every output is produced exactly once.
    """

    def __init__(self) -> None:
        self.records: list[OpRecord] = []
        self._token = None

    def __enter__(self) -> Tape:
        self._token = _ACTIVE.set(self)
        return self

    def __exit__(self, *exc) -> None:
        _ACTIVE.reset(self._token)
        self._token = None

    def __len__(self) -> int:
        return len(self.records)


def _make(name: str, inputs: tuple[Tensor, ...], out: np.ndarray, backward) -> Tensor:
    needs = any(t.requires_grad for t in inputs)
    result = Tensor(out, requires_grad=needs)
    tape = _ACTIVE.get()
    if needs and tape is not None:
        tape.records.append(OpRecord(name, inputs, result, backward))
    return result


def backward(tape: Tape, loss: Tensor) -> None:
    """Fill ``grad`` of every leaf tensor on the tape with d(loss)/d(leaf).

    Leaves that the loss does not depend on receive zeros.
    """
    if loss.size != 1:
        raise ShapeError(f"loss must be a scalar, got shape {loss.shape}")
    produced = {id(r.output) for r in tape.records}
    leaves: dict[int, Tensor] = {}
    for r in tape.records:
        for t in r.inputs:
            if t.requires_grad and id(t) not in produced:
                leaves[id(t)] = t
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for r in reversed(tape.records):
        g = grads.pop(id(r.output), None)
        if g is None:
            continue
        for t, gi in zip(r.inputs, r.backward(g)):
            if gi is None or not t.requires_grad:
                continue
            key = id(t)
            if key in grads:
                grads[key] = grads[key] + gi
            else:
                grads[key] = gi
    if id(loss) not in produced and loss.requires_grad:
        leaves[id(loss)] = loss
    for key, t in leaves.items():
        g = grads.get(key)
        t.grad = np.zeros_like(t.data) if g is None else np.asarray(g, dtype=np.float64).reshape(t.shape)


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}") from None


# -- linear algebra and elementwise arithmetic --------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    ad, bd = a.data, b.data
    return _make("matmul", (a, b), ad @ bd, lambda g: (g @ bd.T, ad.T @ g))


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape("add", a, b)
    sa, sb = a.shape, b.shape
    return _make("add", (a, b), a.data + b.data, lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape("sub", a, b)
    sa, sb = a.shape, b.shape
    return _make("sub", (a, b), a.data - b.data, lambda g: (_unbroadcast(g, sa), -_unbroadcast(g, sb)))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape("mul", a, b)
    ad, bd = a.data, b.data
    return _make("mul", (a, b), ad * bd,
                 lambda g: (_unbroadcast(g * bd, ad.shape), _unbroadcast(g * ad, bd.shape)))


def scale(a: Tensor, c: float) -> Tensor:
    return _make("scale", (a,), a.data * c, lambda g: (g * c,))


def sum(a: Tensor) -> Tensor:  # noqa: A001 - mirrors numpy naming
    shape = a.shape
    return _make("sum", (a,), np.asarray(a.data.sum()), lambda g: (np.broadcast_to(g, shape).copy(),))


def mean(a: Tensor) -> Tensor:
    shape, n = a.shape, max(a.size, 1)
    return _make("mean", (a,), np.asarray(a.data.mean()), lambda g: (np.broadcast_to(g / n, shape).copy(),))


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    old = a.shape
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape: cannot view {old} as {shape}") from None
    return _make("reshape", (a,), out, lambda g: (g.reshape(old),))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    arrays = [t.data for t in tensors]
    try:
        out = np.concatenate(arrays, axis=axis)
    except ValueError:
        raise ShapeError(f"concat: incompatible shapes {[t.shape for t in tensors]} on axis {axis}") from None
    bounds = np.cumsum([0] + [x.shape[axis] for x in arrays])

    def back(g):
        return tuple(np.take(g, np.arange(bounds[i], bounds[i + 1]), axis=axis) for i in range(len(arrays)))

    return _make("concat", tuple(tensors), out, back)


def slice(a: Tensor, key) -> Tensor:  # noqa: A001
    shape = a.shape

    def back(g):
        full = np.zeros(shape)
        full[key] = g
        return (full,)

    return _make("slice", (a,), a.data[key].copy(), back)


# -- nonlinearities -------------------------------------------------------

def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    x = a.data
    factor = np.where(x > 0, 1.0, slope)
    return _make("leaky_relu", (a,), x * factor, lambda g: (g * factor,))


def elu(a: Tensor, alpha: float = 1.0) -> Tensor:
    x = a.data
    neg = alpha * np.expm1(np.minimum(x, 0.0))
    out = np.where(x > 0, x, neg)
    deriv = np.where(x > 0, 1.0, neg + alpha)
    return _make("elu", (a,), out, lambda g: (g * deriv,))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Tensor) -> Tensor:
    s = _sigmoid(a.data)
    return _make("sigmoid", (a,), s, lambda g: (g * s * (1.0 - s),))


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return _make("tanh", (a,), t, lambda g: (g * (1.0 - t * t),))


def abs(a: Tensor) -> Tensor:  # noqa: A001
    sign = np.sign(a.data)
    return _make("abs", (a,), np.abs(a.data), lambda g: (g * sign,))


def _softmax(x: np.ndarray, axis: int) -> np.ndarray:
    z = np.exp(x - x.max(axis=axis, keepdims=True))
    return z / z.sum(axis=axis, keepdims=True)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    y = _softmax(a.data, axis)
    return _make("softmax", (a,), y, lambda g: (y * (g - (g * y).sum(axis=axis, keepdims=True)),))


# -- gathers, scatters and segment reductions --------------------------

def gather_rows(a: Tensor, index: np.ndarray) -> Tensor:
    index = np.asarray(index, dtype=np.int64)
    shape = a.shape

    def back(g):
        full = np.zeros(shape)
        np.add.at(full, index, g)
        return (full,)

    return _make("gather_rows", (a,), a.data[index], back)


def pick(a: Tensor, rows: np.ndarray, cols: np.ndarray) -> Tensor:
    """Elementwise ``a[rows[i], cols[i]]``."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    shape = a.shape

    def back(g):
        full = np.zeros(shape)
        np.add.at(full, (rows, cols), g)
        return (full,)

    return _make("pick", (a,), a.data[rows, cols], back)


def scatter_add(a: Tensor, index: np.ndarray, num_segments: int) -> Tensor:
    """Sum rows of ``a`` into ``num_segments`` buckets given by ``index``."""
    index = np.asarray(index, dtype=np.int64)
    if a.shape[:1] != index.shape:
        raise ShapeError(f"scatter_add: {a.shape[0] if a.shape else 0} rows but {index.shape[0]} indices")
    out = np.zeros((num_segments,) + a.shape[1:])
    np.add.at(out, index, a.data)
    return _make("scatter_add", (a,), out, lambda g: (g[index],))


def segment_max(a: Tensor, index: np.ndarray, num_segments: int) -> Tensor:
    """Columnwise max of the rows of ``a`` within each segment.

    Ties route the gradient to the first row holding the maximum.
    """
    index = np.asarray(index, dtype=np.int64)
    x = a.data
    if x.ndim != 2 or x.shape[0] != index.shape[0]:
        raise ShapeError(f"segment_max: rows {x.shape} vs index {index.shape}")
    counts = np.bincount(index, minlength=num_segments)
    if num_segments and counts.min() == 0:
        raise ShapeError("segment_max: empty segment")
    order = np.argsort(index, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    sorted_x = x[order]
    out = np.maximum.reduceat(sorted_x, starts, axis=0) if num_segments else np.zeros((0, x.shape[1]))
    # first row (in original order) attaining the max, per segment and column
    hit = sorted_x == out[index[order]]
    positions = np.where(hit, np.arange(len(order))[:, None], len(order))
    first = np.minimum.reduceat(positions, starts, axis=0) if num_segments else positions[:0]
    winner = order[first]
    cols = np.arange(x.shape[1])

    def back(g):
        full = np.zeros_like(x)
        np.add.at(full, (winner, np.broadcast_to(cols, winner.shape)), g)
        return (full,)

    return _make("segment_max", (a,), out, back)


def row_max_pool(a: Tensor) -> Tensor:
    """Columnwise max over all rows, as a 1 x columns tensor."""
    return segment_max(a, np.zeros(a.shape[0], dtype=np.int64), 1)


def segment_softmax(a: Tensor, index: np.ndarray, num_segments: int) -> Tensor:
    """Softmax of a vector of logits within each segment given by ``index``."""
    index = np.asarray(index, dtype=np.int64)
    x = a.data
    if x.ndim != 1 or x.shape != index.shape:
        raise ShapeError(f"segment_softmax: logits {x.shape} vs index {index.shape}")
    peak = np.full(num_segments, -np.inf)
    np.maximum.at(peak, index, x)
    z = np.exp(x - peak[index])
    denom = np.zeros(num_segments)
    np.add.at(denom, index, z)
    y = z / denom[index]

    def back(g):
        dot = np.zeros(num_segments)
        np.add.at(dot, index, g * y)
        return (y * (g - dot[index]),)

    return _make("segment_softmax", (a,), y, back)


# -- losses -----------------------------------------------------------------

def cross_entropy_with_logits(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean categorical cross-entropy of integer ``labels`` under ``logits``."""
    labels = np.asarray(labels, dtype=np.int64)
    x = logits.data
    if x.ndim != 2 or x.shape[0] != labels.shape[0]:
        raise ShapeError(f"cross_entropy: logits {x.shape} vs labels {labels.shape}")
    n = x.shape[0]
    shifted = x - x.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    loss = (logz - shifted[rows, labels]).mean()
    probs = _softmax(x, 1)

    def back(g):
        d = probs.copy()
        d[rows, labels] -= 1.0
        return (g * d / n,)

    return _make("cross_entropy", (logits,), np.asarray(loss), back)


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Mean binary cross-entropy of 0/1 ``targets`` under sigmoid(logits)."""
    z = logits.data
    y = np.asarray(targets, dtype=np.float64).reshape(z.shape)
    n = max(z.size, 1)
    loss = (np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))).mean()
    s = _sigmoid(z)
    return _make("bce_with_logits", (logits,), np.asarray(loss), lambda g: (g * (s - y) / n,))


def binary_cross_entropy(probs: Tensor, targets: np.ndarray, eps: float = 1e-12) -> Tensor:
    p = np.clip(probs.data, eps, 1.0 - eps)
    y = np.asarray(targets, dtype=np.float64).reshape(p.shape)
    n = max(p.size, 1)
    loss = -(y * np.log(p) + (1 - y) * np.log(1 - p)).mean()
    return _make("binary_cross_entropy", (probs,), np.asarray(loss),
                 lambda g: (g * (p - y) / (p * (1 - p)) / n,))
