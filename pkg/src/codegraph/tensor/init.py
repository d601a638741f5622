from __future__ import annotations

import numpy as np

from codegraph.tensor.core import Tensor


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None, name=None) -> Tensor:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    data = rng.uniform(-bound, bound, size=shape or (fan_in, fan_out))
    return Tensor(data, requires_grad=True, name=name)


def uniform(rng: np.random.Generator, shape, scale: float = 0.05, name=None) -> Tensor:
    return Tensor(rng.uniform(-scale, scale, size=shape), requires_grad=True, name=name)


def zeros(shape, name=None) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True, name=name)
