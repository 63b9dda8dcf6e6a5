"""
Layer kernels in NHWC layout, each a forward/backward pair.

Forward functions return ``(output, cache)``; backward functions take the
upstream gradient and that cache. Accumulation order inside every kernel is
fixed, so repeated runs are bit-identical.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _check_nhwc(x: np.ndarray, what: str) -> None:
    if x.ndim != 4:
        raise ValueError(f"{what} expects an NHWC tensor, got shape {x.shape}.")


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Stride-1 convolution with zero 'same' padding; ``w`` is ``(k, k, C_in, C_out)``."""
    _check_nhwc(x, "conv2d")
    n, h, wd, c = x.shape
    k, k2, c_in, c_out = w.shape
    if k != k2 or k % 2 == 0:
        raise ValueError(f"Kernel must be square with odd size, got {w.shape[:2]}.")
    if c_in != c:
        raise ValueError(f"Input has {c} channels but the kernel expects {c_in}.")
    if b.shape != (c_out,):
        raise ValueError(f"Bias shape {b.shape} does not match {c_out} output channels.")
    p = k // 2
    xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))
    # cols[n, y, x, i, j, c] = xp[n, y + i, x + j, c]
    cols = sliding_window_view(xp, (k, k), axis=(1, 2)).transpose(0, 1, 2, 4, 5, 3)
    cols = cols.reshape(n * h * wd, k * k * c)
    y = cols @ w.reshape(k * k * c, c_out) + b
    return y.reshape(n, h, wd, c_out), (x.shape, cols, w)


def conv2d_backward(dy: np.ndarray, cache) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x_shape, cols, w = cache
    n, h, wd, c = x_shape
    k, _, _, c_out = w.shape
    p = k // 2
    dy2 = dy.reshape(-1, c_out)
    dw = (cols.T @ dy2).reshape(w.shape)
    db = dy2.sum(axis=0)
    dcols = (dy2 @ w.reshape(-1, c_out).T).reshape(n, h, wd, k, k, c)
    dxp = np.zeros((n, h + 2 * p, wd + 2 * p, c))
    for i in range(k):
        for j in range(k):
            dxp[:, i:i + h, j:j + wd, :] += dcols[:, :, :, i, j, :]
    return dxp[:, p:p + h, p:p + wd, :], dw, db


def relu_forward(x: np.ndarray):
    mask = x > 0
    return np.where(mask, x, 0.0), mask


def relu_backward(dy: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, dy, 0.0)


def maxpool2_forward(x: np.ndarray):
    """2x2 max pooling, stride 2; the cache holds the argmax inside every window."""
    _check_nhwc(x, "maxpool2")
    n, h, w, c = x.shape
    if h % 2 or w % 2:
        raise ValueError(f"maxpool2 needs even spatial dims, got {h}x{w}.")
    windows = x.reshape(n, h // 2, 2, w // 2, 2, c).transpose(0, 1, 3, 5, 2, 4).reshape(n, h // 2, w // 2, c, 4)
    idx = windows.argmax(axis=-1)
    y = np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]
    return y, (x.shape, idx)


def maxpool2_backward(dy: np.ndarray, cache) -> np.ndarray:
    (n, h, w, c), idx = cache
    dwin = np.zeros((n, h // 2, w // 2, c, 4))
    np.put_along_axis(dwin, idx[..., None], dy[..., None], axis=-1)
    return dwin.reshape(n, h // 2, w // 2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(n, h, w, c)


def upsample2_forward(x: np.ndarray):
    """Nearest-neighbour 2x upsampling."""
    _check_nhwc(x, "upsample2")
    return x.repeat(2, axis=1).repeat(2, axis=2), x.shape


def upsample2_backward(dy: np.ndarray, x_shape) -> np.ndarray:
    n, h, w, c = x_shape
    return dy.reshape(n, h, 2, w, 2, c).sum(axis=(2, 4))


def dropout_forward(x: np.ndarray, rate: float, train_mode: bool, rng: Optional[np.random.Generator]):
    """Inverted dropout; an exact identity outside train mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"Dropout rate must lie in [0, 1), got {rate}.")
    if not train_mode or rate == 0.0:
        return x, None
    if rng is None:
        raise ValueError("Train-mode dropout needs a random generator.")
    scale = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * scale, scale


def dropout_backward(dy: np.ndarray, scale: Optional[np.ndarray]) -> np.ndarray:
    return dy if scale is None else dy * scale


def relu(x: np.ndarray) -> np.ndarray:
    return relu_forward(x)[0]


def maxpool2(x: np.ndarray) -> np.ndarray:
    return maxpool2_forward(x)[0]


def upsample2_nearest(x: np.ndarray) -> np.ndarray:
    return upsample2_forward(x)[0]


def dropout(x: np.ndarray, rate: float, train_mode: bool, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    return dropout_forward(x, rate, train_mode, rng)[0]
