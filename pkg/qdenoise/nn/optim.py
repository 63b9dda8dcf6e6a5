from __future__ import annotations

from typing import Dict

import numpy as np

from .model import ModelParams


class NonFiniteGradientError(FloatingPointError):
    """Raised when a gradient holds NaN or Inf; names the offending tensor."""

    def __init__(self, tensor_name: str):
        self.tensor_name = tensor_name
        super().__init__(f"Non-finite gradient for tensor '{tensor_name}'.")


def adam_step(
    params: ModelParams,
    grads: Dict[str, np.ndarray],
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> ModelParams:
    """One bias-corrected Adam update, applied in place; returns ``params``."""
    for name, t in params.tensors.items():
        g = grads.get(name)
        if g is None:
            raise ValueError(f"Missing gradient for tensor '{name}'.")
        if g.shape != t.data.shape:
            raise ValueError(f"Gradient for '{name}' has shape {g.shape}, expected {t.data.shape}.")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(name)

    params.step += 1
    bias1 = 1.0 - beta1 ** params.step
    bias2 = 1.0 - beta2 ** params.step
    for name, t in params.tensors.items():
        g = grads[name]
        m = params.m.setdefault(name, np.zeros_like(t.data))
        v = params.v.setdefault(name, np.zeros_like(t.data))
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        t.data -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
    return params
