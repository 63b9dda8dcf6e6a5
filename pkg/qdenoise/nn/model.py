"""
The convolutional denoising autoencoder.

Encoder: one block per filter count, conv -> relu -> maxpool2 -> dropout.
Decoder: the filter counts mirrored, conv -> relu -> upsample2 -> dropout.
Output: a linear conv back to 2 channels. With ``skip`` set, that conv also
sees the input channels and a diagonal-marker channel; its input taps start
as the identity and its decoder taps at zero, so an untrained model returns
its input unchanged. Weights use the ``(k, k, C_in, C_out)`` layout and
Glorot-uniform initialisation.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..quantum.rng import make_rng
from . import layers
from .tensor import Tensor

CHANNELS = 2
SKIP_CHANNELS = CHANNELS + 1


@dataclass(frozen=True)
class ModelConfig:
    dim: int
    filters: Tuple[int, ...] = (32, 64, 128)
    kernel_size: int = 3
    dropout: float = 0.1
    lam: float = 1.0
    skip: bool = True

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(int(f) for f in self.filters))
        if not self.filters or any(f <= 0 for f in self.filters):
            raise ValueError(f"Filter counts must be positive, got {list(self.filters)}.")
        if self.kernel_size <= 0 or self.kernel_size % 2 == 0:
            raise ValueError(f"Kernel size must be odd and positive, got {self.kernel_size}.")
        if self.dim <= 0 or self.dim % (2 ** len(self.filters)):
            raise ValueError(f"dim {self.dim} must be divisible by 2^{len(self.filters)}.")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"Dropout rate must lie in [0, 1), got {self.dropout}.")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}.")

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["filters"] = list(self.filters)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ModelConfig":
        return cls(
            dim=int(d["dim"]),
            filters=tuple(d["filters"]),
            kernel_size=int(d["kernel_size"]),
            dropout=float(d["dropout"]),
            lam=float(d["lam"]),
            skip=bool(d.get("skip", True)),
        )

    def layer_shapes(self) -> List[Tuple[str, int, int]]:
        """(layer id, input channels, output channels) for every conv, in forward order."""
        shapes = []
        c_in = CHANNELS
        for i, f in enumerate(self.filters):
            shapes.append((f"enc{i}", c_in, f))
            c_in = f
        for i, f in enumerate(reversed(self.filters)):
            shapes.append((f"dec{i}", c_in, f))
            c_in = f
        shapes.append(("out", c_in + (SKIP_CHANNELS if self.skip else 0), CHANNELS))
        return shapes


@dataclass
class ModelParams:
    """Named weight/bias tensors plus Adam moment slots and the step counter."""
    tensors: Dict[str, Tensor] = field(default_factory=dict)
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    def zero_grad(self) -> None:
        for t in self.tensors.values():
            t.zero_grad()

    def grads(self) -> Dict[str, np.ndarray]:
        return {name: (t.grad if t.grad is not None else np.zeros_like(t.data)) for name, t in self.tensors.items()}

    def copy(self) -> "ModelParams":
        return ModelParams(
            tensors={name: Tensor(t.data.copy()) for name, t in self.tensors.items()},
            m={name: a.copy() for name, a in self.m.items()},
            v={name: a.copy() for name, a in self.v.items()},
            step=self.step,
        )

    def count(self) -> int:
        return sum(t.data.size for t in self.tensors.values())


def init_params(config: ModelConfig, seed: int) -> ModelParams:
    rng = make_rng(seed)
    k = config.kernel_size
    params = ModelParams()
    for name, c_in, c_out in config.layer_shapes():
        limit = math.sqrt(6.0 / (k * k * c_in + k * k * c_out))
        params.tensors[f"{name}.w"] = Tensor(rng.uniform(-limit, limit, size=(k, k, c_in, c_out)))
        params.tensors[f"{name}.b"] = Tensor(np.zeros(c_out))
    if config.skip:
        w = params.tensors["out.w"].data
        w[...] = 0.0
        for c in range(CHANNELS):
            w[k // 2, k // 2, config.filters[0] + c, c] = 1.0
    for name, t in params.tensors.items():
        params.m[name] = np.zeros_like(t.data)
        params.v[name] = np.zeros_like(t.data)
    return params


class Autoencoder:
    """Forward pass with cached activations and the matching reverse pass."""

    def __init__(self, config: ModelConfig, params: ModelParams):
        self.config = config
        self.params = params
        self._tape: List[Tuple[str, Any]] = []

    def _with_skip(self, h: np.ndarray, x: np.ndarray) -> np.ndarray:
        if not self.config.skip:
            return h
        dim = self.config.dim
        marker = np.broadcast_to(np.eye(dim)[None, :, :, None], (len(x), dim, dim, 1))
        self._tape.append(("skip", h.shape[-1]))
        return np.concatenate([h, x, marker], axis=-1)

    def _conv(self, name: str, x: np.ndarray) -> np.ndarray:
        w = self.params.tensors[f"{name}.w"].data
        b = self.params.tensors[f"{name}.b"].data
        y, cache = layers.conv2d_forward(x, w, b)
        self._tape.append(("conv", (name, cache)))
        return y

    def forward(self, x: np.ndarray, train_mode: bool = False, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        dim = self.config.dim
        if x.ndim != 4 or x.shape[1:] != (dim, dim, CHANNELS):
            raise ValueError(f"Expected input of shape (N, {dim}, {dim}, {CHANNELS}), got {x.shape}.")
        rate = self.config.dropout
        self._tape = []
        h = x
        for i in range(len(self.config.filters)):
            h = self._conv(f"enc{i}", h)
            h, mask = layers.relu_forward(h)
            self._tape.append(("relu", mask))
            h, cache = layers.maxpool2_forward(h)
            self._tape.append(("maxpool", cache))
            h, scale = layers.dropout_forward(h, rate, train_mode, rng)
            self._tape.append(("dropout", scale))
        for i in range(len(self.config.filters)):
            h = self._conv(f"dec{i}", h)
            h, mask = layers.relu_forward(h)
            self._tape.append(("relu", mask))
            h, cache = layers.upsample2_forward(h)
            self._tape.append(("upsample", cache))
            h, scale = layers.dropout_forward(h, rate, train_mode, rng)
            self._tape.append(("dropout", scale))
        return self._conv("out", self._with_skip(h, x))

    def backward(self, dy: np.ndarray) -> Dict[str, np.ndarray]:
        """Accumulates parameter gradients for the last forward pass; returns them by name."""
        if not self._tape:
            raise RuntimeError("backward called before forward.")
        for t in self.params.tensors.values():
            if t.grad is None:
                t.zero_grad()
        g = dy
        for op, cache in reversed(self._tape):
            if op == "conv":
                name, conv_cache = cache
                g, dw, db = layers.conv2d_backward(g, conv_cache)
                self.params.tensors[f"{name}.w"].accumulate(dw)
                self.params.tensors[f"{name}.b"].accumulate(db)
            elif op == "relu":
                g = layers.relu_backward(g, cache)
            elif op == "maxpool":
                g = layers.maxpool2_backward(g, cache)
            elif op == "upsample":
                g = layers.upsample2_backward(g, cache)
            elif op == "dropout":
                g = layers.dropout_backward(g, cache)
            elif op == "skip":
                g = g[..., :cache]
        return self.params.grads()

    def activation_pattern(self) -> bytes:
        """Fingerprint of every ReLU mask and max-pool choice of the last forward pass."""
        parts = []
        for op, cache in self._tape:
            if op == "relu":
                parts.append(np.packbits(cache).tobytes())
            elif op == "maxpool":
                parts.append(cache[1].astype(np.uint8).tobytes())
        return b"|".join(parts)

    def predict(self, x: np.ndarray, batch_size: int = 64) -> np.ndarray:
        """Eval-mode forward over ``x`` in batches."""
        outputs = [self.forward(x[i:i + batch_size]) for i in range(0, len(x), batch_size)]
        self._tape = []
        return np.concatenate(outputs, axis=0) if outputs else np.empty_like(x)


def model_forward(
    params: ModelParams,
    config: ModelConfig,
    x: np.ndarray,
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    return Autoencoder(config, params).forward(x, train_mode, rng)
