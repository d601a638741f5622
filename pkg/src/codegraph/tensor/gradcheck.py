from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from codegraph.tensor.core import Tape, Tensor, backward


def finite_diff_check(f: Callable[[], Tensor], params: Sequence[Tensor], h: float = 1e-5,
                      max_coords: int | None = None, seed: int = 0) -> float:
    """Max relative error between backward gradients and central differences.

    ``f`` closes over ``params`` and returns a scalar tensor. With
    ``max_coords`` set, each parameter is probed on that many random
    coordinates instead of all of them.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    with Tape() as tape:
        loss = f()
    backward(tape, loss)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        coords = np.arange(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = rng.choice(flat.size, size=max_coords, replace=False)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            up = f().item()
            flat[i] = orig - h
            down = f().item()
            flat[i] = orig
            numeric = (up - down) / (2 * h)
            a = grad.reshape(-1)[i]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            worst = max(worst, err)
    return worst
