"""
QDS1 binary dataset container.

Layout, all little-endian::

    header  magic b"QDS1" | version u32 | num_qubits u32 | dim u32 | num_samples u64
    record  kind u8 | pad 7 | level f64 | sample_seed u64 | clean | noisy

``clean`` and ``noisy`` are ``dim * dim`` complex entries stored row-major as
interleaved (re, im) f64 pairs. Records have a fixed stride, so record ``i``
starts at ``HEADER.size + i * record_size(dim)``. A JSON manifest is written
next to the binary file as ``<path>.json``.
"""
from __future__ import annotations

import json
import logging
import os
import struct
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from ..fileio import PathLike, atomic_write_bytes
from ..models import QDS_VERSION, Dataset, DatasetManifest, SampleRecord
from ..noise import NoiseKind
from ..quantum import DensityMatrix

logger = logging.getLogger(__name__)

MAGIC = b"QDS1"
HEADER = struct.Struct("<4sIIIQ")
RECORD_PREFIX = struct.Struct("<B7xdQ")
COMPLEX_LE = np.dtype("<c16")


class QDSFormatError(ValueError):
    """A malformed QDS1 file, located by byte offset (and record, when known)."""

    def __init__(self, reason: str, offset: int, record_index: Optional[int] = None):
        self.reason = reason
        self.offset = offset
        self.record_index = record_index
        where = f"byte offset {offset}"
        if record_index is not None:
            where = f"record {record_index} ({where})"
        super().__init__(f"{reason} at {where}")


def record_size(dim: int) -> int:
    return RECORD_PREFIX.size + 2 * dim * dim * COMPLEX_LE.itemsize


def manifest_path(path: PathLike) -> Path:
    return Path(f"{os.fspath(path)}.json")


def encode_qds(dataset: Dataset) -> bytes:
    m = dataset.manifest
    chunks = [HEADER.pack(MAGIC, QDS_VERSION, m.num_qubits, m.dim, len(dataset.records))]
    for r in dataset.records:
        chunks.append(RECORD_PREFIX.pack(r.noise_kind, r.noise_level, r.sample_seed))
        chunks.append(np.ascontiguousarray(r.clean.mat, dtype=COMPLEX_LE).tobytes())
        chunks.append(np.ascontiguousarray(r.noisy.mat, dtype=COMPLEX_LE).tobytes())
    return b"".join(chunks)


def write_qds(dataset: Dataset, path: PathLike) -> Path:
    """Writes the binary file and its manifest; both land atomically via ``.partial`` files."""
    path = Path(path)
    if dataset.manifest.num_samples != len(dataset.records):
        raise ValueError(
            f"Manifest says {dataset.manifest.num_samples} samples but {len(dataset.records)} records are present."
        )
    payload = encode_qds(dataset)
    atomic_write_bytes(path, payload)
    atomic_write_bytes(manifest_path(path), _manifest_bytes(dataset.manifest))
    logger.info("Wrote %d samples to %s (%d bytes).", len(dataset.records), path, len(payload))
    return path


def _manifest_bytes(manifest: DatasetManifest) -> bytes:
    return (json.dumps(asdict(manifest), indent=2) + "\n").encode("utf-8")


def decode_qds(data: bytes, manifest: Optional[DatasetManifest] = None, validate: bool = True) -> Dataset:
    if len(data) < HEADER.size:
        raise QDSFormatError("truncated header", len(data))
    magic, version, num_qubits, dim, num_samples = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise QDSFormatError(f"bad magic {magic!r}", 0)
    if version != QDS_VERSION:
        raise QDSFormatError(f"unsupported version {version}", 4)
    if dim != 2 ** num_qubits:
        raise QDSFormatError(f"dim {dim} does not match {num_qubits} qubits", 12)

    stride = record_size(dim)
    expected = HEADER.size + num_samples * stride
    if len(data) < expected:
        index = (len(data) - HEADER.size) // stride
        raise QDSFormatError("truncated record", HEADER.size + index * stride, index)
    if len(data) > expected:
        raise QDSFormatError(f"{len(data) - expected} trailing bytes", expected)

    entries = dim * dim
    records = []
    for i in range(num_samples):
        offset = HEADER.size + i * stride
        code, level, seed = RECORD_PREFIX.unpack_from(data, offset)
        if code not in NoiseKind._value2member_map_:
            raise QDSFormatError(f"unknown noise kind code {code}", offset, i)
        body = offset + RECORD_PREFIX.size
        clean = np.frombuffer(data, COMPLEX_LE, entries, body).reshape(dim, dim).astype(np.complex128)
        noisy = np.frombuffer(data, COMPLEX_LE, entries, body + entries * COMPLEX_LE.itemsize)
        noisy = noisy.reshape(dim, dim).astype(np.complex128)
        record = SampleRecord(DensityMatrix(num_qubits, clean), DensityMatrix(num_qubits, noisy), code, level, seed)
        if validate:
            _validate_record(record, offset, i)
        records.append(record)

    if manifest is None:
        manifest = DatasetManifest(
            num_qubits=num_qubits,
            dim=dim,
            num_samples=num_samples,
            levels=sorted({r.noise_level for r in records}),
            kinds=[NoiseKind(c).label for c in sorted({r.noise_kind for r in records})],
            global_seed=None,
        )
    elif (manifest.num_qubits, manifest.dim, manifest.num_samples) != (num_qubits, dim, num_samples):
        raise QDSFormatError("manifest does not match the binary header", 0)
    return Dataset(manifest, records)


def _validate_record(record: SampleRecord, offset: int, index: int) -> None:
    from ..metrics import purity

    for name in ("clean", "noisy"):
        problems = getattr(record, name).invariant_violations()
        if problems:
            raise QDSFormatError(f"invalid {name} state: {'; '.join(problems)}", offset, index)
    if abs(purity(record.clean) - 1.0) > 1e-10:
        raise QDSFormatError("clean state is not pure", offset, index)


def read_qds(path: PathLike, validate: bool = True) -> Dataset:
    """Reads a QDS1 file (and its manifest when present)."""
    path = Path(path)
    data = path.read_bytes()
    manifest = None
    sidecar = manifest_path(path)
    if sidecar.exists():
        try:
            manifest = DatasetManifest(**json.loads(sidecar.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, TypeError) as e:
            raise QDSFormatError(f"unreadable manifest {sidecar.name}: {e}", 0) from e
    dataset = decode_qds(data, manifest, validate)
    logger.info("Read %d samples from %s.", len(dataset.records), path)
    return dataset
