"""
QNN1 checkpoint container.

Layout, all little-endian::

    magic b"QNN1" | version u32 | echo_len u32 | echo (UTF-8 JSON) | count u32
    count x ( name_len u32 | name | rank u32 | dims u64 x rank | f64 payload )

The JSON echo holds the model config under ``"model"`` and free-form run
metadata under ``"run"``.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..fileio import PathLike, atomic_write_bytes
from .model import ModelConfig, ModelParams, init_params
from .tensor import Tensor

MAGIC = b"QNN1"
VERSION = 1
U32 = struct.Struct("<I")
F64_LE = np.dtype("<f8")


class CheckpointError(ValueError):
    """A malformed checkpoint or one built for a different model config."""


def encode_checkpoint(params: ModelParams, config: ModelConfig, run: Optional[Dict[str, Any]] = None) -> bytes:
    echo = json.dumps({"model": config.to_dict(), "run": run or {}}, sort_keys=True).encode("utf-8")
    chunks = [MAGIC, U32.pack(VERSION), U32.pack(len(echo)), echo, U32.pack(len(params.tensors))]
    for name, t in params.tensors.items():
        raw = name.encode("utf-8")
        chunks += [U32.pack(len(raw)), raw, U32.pack(t.data.ndim)]
        chunks.append(struct.pack(f"<{t.data.ndim}Q", *t.data.shape))
        chunks.append(np.ascontiguousarray(t.data, dtype=F64_LE).tobytes())
    return b"".join(chunks)


def save_checkpoint(
    path: PathLike,
    params: ModelParams,
    config: ModelConfig,
    run: Optional[Dict[str, Any]] = None,
) -> Path:
    return atomic_write_bytes(path, encode_checkpoint(params, config, run))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CheckpointError(f"Checkpoint truncated at byte offset {self.pos}.")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return U32.unpack(self.take(U32.size))[0]


def decode_checkpoint(
    data: bytes, expected: Optional[ModelConfig] = None
) -> Tuple[ModelParams, ModelConfig, Dict[str, Any]]:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise CheckpointError("Not a QNN1 checkpoint (bad magic).")
    version = r.u32()
    if version != VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {version}.")
    try:
        echo = json.loads(r.take(r.u32()).decode("utf-8"))
        config = ModelConfig.from_dict(echo["model"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise CheckpointError(f"Unreadable config echo: {e}") from e
    if expected is not None and config.to_dict() != expected.to_dict():
        raise CheckpointError(f"Checkpoint config {config.to_dict()} does not match {expected.to_dict()}.")

    params = ModelParams()
    for _ in range(r.u32()):
        name = r.take(r.u32()).decode("utf-8")
        rank = r.u32()
        shape = struct.unpack(f"<{rank}Q", r.take(8 * rank))
        size = int(np.prod(shape)) if rank else 1
        values = np.frombuffer(r.take(size * F64_LE.itemsize), dtype=F64_LE).reshape(shape)
        params.tensors[name] = Tensor(values.astype(np.float64))
    if r.pos != len(data):
        raise CheckpointError(f"{len(data) - r.pos} trailing bytes after the last tensor.")

    reference = init_params(config, 0)
    for name, t in reference.tensors.items():
        if name not in params.tensors or params.tensors[name].shape != t.shape:
            raise CheckpointError(f"Tensor '{name}' missing or mis-shaped for this model config.")
    if set(params.tensors) != set(reference.tensors):
        raise CheckpointError("Checkpoint holds tensors the model config does not define.")
    params.m = {name: np.zeros_like(t.data) for name, t in params.tensors.items()}
    params.v = {name: np.zeros_like(t.data) for name, t in params.tensors.items()}
    return params, config, echo.get("run", {})


def load_checkpoint(
    path: PathLike, expected: Optional[ModelConfig] = None
) -> Tuple[ModelParams, ModelConfig, Dict[str, Any]]:
    return decode_checkpoint(Path(path).read_bytes(), expected)
