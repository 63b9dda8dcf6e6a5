"""
Density-matrix heatmaps as 8-bit binary PGM (P5) images.

Each image maps ``[-maxabs, +maxabs]`` linearly onto ``[0, 255]`` so zero
sits at mid-gray (128); the per-image ``maxabs`` goes into a JSON sidecar.
"""
from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from ..fileio import PathLike, atomic_write_bytes, atomic_write_text
from ..models import SampleRecord
from ..quantum import DensityMatrix
from .reports import ReportError

logger = logging.getLogger(__name__)

MID_GRAY = 128
_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def to_gray(values: np.ndarray) -> Tuple[np.ndarray, float]:
    """Returns the uint8 image and the ``maxabs`` scale used."""
    values = np.asarray(values, dtype=np.float64)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        return np.full(values.shape, MID_GRAY, dtype=np.uint8), 0.0
    pixels = np.rint((values / scale + 1.0) * 127.5)
    return np.clip(pixels, 0, 255).astype(np.uint8), scale


def from_gray(pixels: np.ndarray, scale: float) -> np.ndarray:
    return (pixels.astype(np.float64) / 127.5 - 1.0) * scale


def encode_pgm(pixels: np.ndarray) -> bytes:
    if pixels.ndim != 2 or pixels.dtype != np.uint8:
        raise ValueError(f"PGM needs a 2-D uint8 array, got {pixels.dtype} {pixels.shape}.")
    height, width = pixels.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    match = _PGM_HEADER.match(data)
    if not match:
        raise ValueError("Not a binary PGM (P5) image.")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise ValueError(f"Only 8-bit PGM is supported, got maxval {maxval}.")
    body = data[match.end():]
    if len(body) != width * height:
        raise ValueError(f"PGM body has {len(body)} bytes, expected {width * height}.")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width)


def export_heatmaps(
    sample: SampleRecord,
    corrected: DensityMatrix,
    out_dir: PathLike,
    prefix: str = "sample",
) -> List[Path]:
    """
    Writes real and imaginary parts of the clean, noisy and corrected states
    as six PGM files named ``<prefix>_<state>_<part>.pgm``, plus
    ``<prefix>_scales.json``.
    """
    if corrected.mat.shape != sample.clean.mat.shape:
        raise ValueError(f"Corrected state shape {corrected.mat.shape} does not match {sample.clean.mat.shape}.")
    out_dir = Path(out_dir)
    scales: Dict[str, float] = {}
    written: List[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for state_name, state in (("clean", sample.clean), ("noisy", sample.noisy), ("corrected", corrected)):
            for part, values in (("real", state.mat.real), ("imag", state.mat.imag)):
                key = f"{state_name}_{part}"
                pixels, scales[key] = to_gray(values)
                written.append(atomic_write_bytes(out_dir / f"{prefix}_{key}.pgm", encode_pgm(pixels)))
        written.append(atomic_write_text(
            out_dir / f"{prefix}_scales.json", json.dumps(scales, indent=2, sort_keys=True) + "\n"
        ))
    except OSError as e:
        raise ReportError(out_dir, str(e)) from e
    logger.debug("Wrote heatmaps for %s to %s", prefix, out_dir)
    return written
