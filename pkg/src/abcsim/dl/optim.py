"""Adam with bias correction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params: dict, grads: dict, state: AdamState, t: int, lr: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
    """One in-place Adam update at step ``t`` (1-based); returns ``(params, state)``."""
    if t < 1:
        raise ValueError("Adam step counter starts at 1")
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for k, g in grads.items():
        m = state.m.setdefault(k, np.zeros_like(params[k]))
        v = state.v.setdefault(k, np.zeros_like(params[k]))
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        params[k] -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return params, state
