"""
Conversion between density matrices and 2-channel real arrays.
"""
from __future__ import annotations

import numpy as np

from ..linalg import CMat
from ..quantum.state import DensityMatrix


def dm_to_channels(rho: DensityMatrix) -> np.ndarray:
    """Channel 0 holds the real part, channel 1 the imaginary part: shape ``(dim, dim, 2)``."""
    return np.stack([rho.mat.real, rho.mat.imag], axis=-1).astype(np.float64)


def channels_to_dm(t: np.ndarray) -> CMat:
    """Inverse of ``dm_to_channels``; returns the raw complex matrix (no projection)."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3 or t.shape[2] != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"Expected a (dim, dim, 2) tensor, got shape {t.shape}.")
    out = np.empty(t.shape[:2], dtype=np.complex128)
    out.real = t[..., 0]
    out.imag = t[..., 1]
    return out
