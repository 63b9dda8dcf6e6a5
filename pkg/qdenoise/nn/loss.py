"""
Composite training loss ``MSE(Y, Y_hat) + lambda * (1 - F_s(Y, Y_hat))``.

``F_s`` is the Frobenius surrogate fidelity computed per sample on the complex
matrix reassembled from the two channels. Because
``Re<rho, sigma> = sum(re*re' + im*im')`` and the Frobenius norm equals the
Euclidean norm of both channels, ``F_s`` is the cosine similarity of the
flattened (dim, dim, 2) arrays, which keeps the gradient closed-form.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from ..metrics import ZERO_NORM


def _check(y_pred: np.ndarray, y_true: np.ndarray) -> None:
    if y_pred.shape != y_true.shape:
        raise ValueError(f"Shape mismatch: prediction {y_pred.shape} vs target {y_true.shape}.")
    if y_pred.ndim != 4 or y_pred.shape[-1] != 2:
        raise ValueError(f"Expected (N, dim, dim, 2) tensors, got {y_pred.shape}.")


def batch_surrogate(y_pred: np.ndarray, y_true: np.ndarray) -> np.ndarray:
    """Per-sample surrogate fidelity; 0 for samples where either side has zero norm."""
    _check(y_pred, y_true)
    p = y_pred.reshape(len(y_pred), -1)
    t = y_true.reshape(len(y_true), -1)
    norm_p = np.linalg.norm(p, axis=1)
    norm_t = np.linalg.norm(t, axis=1)
    valid = (norm_p >= ZERO_NORM) & (norm_t >= ZERO_NORM)
    out = np.zeros(len(p))
    out[valid] = np.einsum("ij,ij->i", p[valid], t[valid]) / (norm_p[valid] * norm_t[valid])
    return out


def composite_loss(y_pred: np.ndarray, y_true: np.ndarray, lam: float) -> Tuple[float, np.ndarray]:
    """Returns the batch loss and its gradient with respect to ``y_pred``."""
    y_pred = np.asarray(y_pred, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.float64)
    _check(y_pred, y_true)
    n = len(y_pred)
    diff = y_pred - y_true
    mse = float(np.mean(diff * diff))
    grad = 2.0 * diff / diff.size
    if lam == 0:
        return mse, grad

    p = y_pred.reshape(n, -1)
    t = y_true.reshape(n, -1)
    norm_p = np.linalg.norm(p, axis=1)
    norm_t = np.linalg.norm(t, axis=1)
    # zero-norm samples contribute F_s = 0 with zero gradient
    valid = (norm_p >= ZERO_NORM) & (norm_t >= ZERO_NORM)
    fid = np.zeros(n)
    dfid = np.zeros_like(p)
    if np.any(valid):
        pv, tv = p[valid], t[valid]
        npv, ntv = norm_p[valid][:, None], norm_t[valid][:, None]
        dot = np.einsum("ij,ij->i", pv, tv)[:, None]
        fid[valid] = (dot / (npv * ntv))[:, 0]
        dfid[valid] = tv / (npv * ntv) - dot * pv / (npv ** 3 * ntv)
    loss = mse + lam * (1.0 - float(np.mean(fid)))
    grad = grad - (lam / n) * dfid.reshape(y_pred.shape)
    return loss, grad
