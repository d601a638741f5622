"""Adamax: Adam with the second moment replaced by an infinity norm."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from codegraph.errors import ShapeError
from codegraph.tensor.core import Tensor


@dataclass
class AdamaxState:
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    u: dict[str, np.ndarray] = field(default_factory=dict)


def adamax_step(params: Mapping[str, Tensor], grads: Mapping[str, np.ndarray] | None,
                state: AdamaxState) -> AdamaxState:
    """Apply one update in place. ``grads`` defaults to each parameter's grad slot.

    Parameters without a gradient are treated as having a zero gradient.
    """
    state.t += 1
    correction = state.lr / (1.0 - state.beta1 ** state.t)
    for name, p in params.items():
        g = grads.get(name) if grads is not None else p.grad
        if g is None:
            g = np.zeros_like(p.data)
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeError(f"adamax: gradient {g.shape} does not match parameter {name} {p.shape}")
        m = state.m.get(name)
        u = state.u.get(name)
        if m is None:
            m = np.zeros_like(p.data)
            u = np.zeros_like(p.data)
        m = state.beta1 * m + (1.0 - state.beta1) * g
        u = np.maximum(state.beta2 * u, np.abs(g))
        state.m[name] = m
        state.u[name] = u
        p.data = p.data - correction * m / (u + state.eps)
    return state
