from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .noise import NoiseKind
from .quantum import DensityMatrix

QDS_VERSION = 1


@dataclass
class SampleRecord:
    """One dataset sample: the clean state, its noisy version, and the noise label."""
    clean: DensityMatrix
    noisy: DensityMatrix
    noise_kind: int
    noise_level: float
    sample_seed: int

    @property
    def kind(self) -> NoiseKind:
        return NoiseKind(self.noise_kind)

    @property
    def cell(self) -> Tuple[int, float]:
        return (self.noise_kind, self.noise_level)


@dataclass
class DatasetManifest:
    """Metadata written next to every QDS1 file as JSON."""
    num_qubits: int
    dim: int
    num_samples: int
    levels: List[float]
    kinds: List[str]
    global_seed: Optional[int]
    version: int = QDS_VERSION
    created: Optional[str] = None
    depth_min: Optional[int] = None
    depth_max: Optional[int] = None


@dataclass
class Dataset:
    """A manifest plus its records, in sample-index order."""
    manifest: DatasetManifest
    records: List[SampleRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def cell_counts(self) -> Dict[Tuple[str, float], int]:
        """Number of samples per (kind name, level) cell."""
        counts = Counter((r.kind.label, r.noise_level) for r in self.records)
        return dict(sorted(counts.items(), key=lambda item: (NoiseKind.from_name(item[0][0]), item[0][1])))

    def channels(self, indices: Optional[Sequence[int]] = None, which: str = "noisy") -> np.ndarray:
        """Stacks the selected states as a ``(N, dim, dim, 2)`` real array."""
        from .dataset.tensors import dm_to_channels

        if which not in ("noisy", "clean"):
            raise ValueError(f"which must be 'noisy' or 'clean', got '{which}'.")
        if indices is None:
            indices = range(len(self.records))
        dim = self.manifest.dim
        out = np.empty((len(indices), dim, dim, 2), dtype=np.float64)
        for row, i in enumerate(indices):
            out[row] = dm_to_channels(getattr(self.records[i], which))
        return out
