"""
Sample generation pipeline.

Sample ``i`` is a pure function of ``(config, global_seed, i)``: its circuit
seed is ``derive_seed(global_seed, i)`` and its (kind, level) cell is
``i mod (len(kinds) * len(levels))``, so worker count never changes the output.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..models import Dataset, DatasetManifest, SampleRecord
from ..noise import NoiseKind, NoiseSpec, apply_noise
from ..quantum import derive_seed, random_circuit, simulate_clean

logger = logging.getLogger(__name__)

NOISE_STREAM = 1


class DatasetGenerator:
    """Generates balanced samples, optionally on a thread pool."""

    def __init__(
        self,
        num_qubits: int,
        depth_min: int,
        depth_max: int,
        kinds: Sequence[NoiseKind],
        levels: Sequence[float],
        global_seed: int,
        threads: int = 1,
        on_progress: Optional[Callable[[int, int], None]] = None,
    ):
        if not kinds:
            raise ValueError("At least one noise kind is required.")
        if not levels:
            raise ValueError("At least one noise level is required.")
        if any(not 0.0 <= p <= 1.0 for p in levels):
            raise ValueError(f"Noise levels must lie in [0, 1], got {list(levels)}.")
        if depth_min < 0 or depth_min > depth_max:
            raise ValueError(f"Invalid depth range [{depth_min}, {depth_max}].")
        if num_qubits < 2:
            raise ValueError(f"num_qubits must be at least 2, got {num_qubits}.")
        self.num_qubits = num_qubits
        self.depth_min = depth_min
        self.depth_max = depth_max
        self.kinds = [NoiseKind(k) for k in kinds]
        self.levels = [float(p) for p in levels]
        self.global_seed = global_seed
        self.threads = max(1, threads)
        self.on_progress = on_progress

    @property
    def num_cells(self) -> int:
        return len(self.kinds) * len(self.levels)

    def cell_for(self, index: int) -> Tuple[NoiseKind, float]:
        cell = index % self.num_cells
        return self.kinds[cell // len(self.levels)], self.levels[cell % len(self.levels)]

    def generate_sample(self, index: int) -> SampleRecord:
        sample_seed = derive_seed(self.global_seed, index)
        circuit = random_circuit(self.num_qubits, self.depth_min, self.depth_max, sample_seed)
        kind, level = self.cell_for(index)
        clean = simulate_clean(circuit)
        noisy = apply_noise(clean, NoiseSpec(kind, level), derive_seed(sample_seed, NOISE_STREAM))
        logger.debug(
            "Sample %d: depth %d, %d gates (%d two-qubit), %s @ %g",
            index, circuit.depth, circuit.gate_count, circuit.two_qubit_gate_count, kind.label, level,
        )
        return SampleRecord(clean, noisy, int(kind), level, sample_seed)

    def generate(self, num_samples: int) -> Dataset:
        if num_samples < 1:
            raise ValueError(f"num_samples must be positive, got {num_samples}.")
        records: List[Optional[SampleRecord]] = [None] * num_samples
        logger.info(
            "Generating %d samples (%d qubits, depth %d-%d, %d cells) on %d thread(s).",
            num_samples, self.num_qubits, self.depth_min, self.depth_max, self.num_cells, self.threads,
        )
        if self.threads == 1:
            for i in range(num_samples):
                records[i] = self.generate_sample(i)
                self._report(i + 1, num_samples)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                futures = {executor.submit(self.generate_sample, i): i for i in range(num_samples)}
                for done, future in enumerate(as_completed(futures), start=1):
                    records[futures[future]] = future.result()
                    self._report(done, num_samples)

        manifest = DatasetManifest(
            num_qubits=self.num_qubits,
            dim=2 ** self.num_qubits,
            num_samples=num_samples,
            levels=list(self.levels),
            kinds=[k.label for k in self.kinds],
            global_seed=self.global_seed,
            created=datetime.now(timezone.utc).isoformat(),
            depth_min=self.depth_min,
            depth_max=self.depth_max,
        )
        return Dataset(manifest, [r for r in records if r is not None])

    def _report(self, done: int, total: int) -> None:
        if self.on_progress:
            self.on_progress(done, total)
        if done % 1000 == 0 or done == total:
            logger.info("Generated %d/%d samples.", done, total)


def generate_dataset(
    num_samples: int,
    num_qubits: int,
    depth_range: Tuple[int, int],
    kinds: Sequence[NoiseKind],
    levels: Sequence[float],
    global_seed: int,
    threads: int = 1,
) -> Dataset:
    """Functional entry point around ``DatasetGenerator``."""
    generator = DatasetGenerator(num_qubits, depth_range[0], depth_range[1], kinds, levels, global_seed, threads)
    return generator.generate(num_samples)


def cell_table(dataset: Dataset) -> Dict[str, int]:
    """Per-cell counts keyed ``kind@level`` for printing."""
    return {f"{kind}@{level:g}": n for (kind, level), n in dataset.cell_counts().items()}
