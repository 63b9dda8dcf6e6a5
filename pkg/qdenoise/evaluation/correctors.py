from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from ..dataset.tensors import dm_to_channels
from ..models import SampleRecord
from ..nn import Autoencoder


class Corrector(Protocol):
    """Protocol for anything that maps noisy 2-channel states to corrected ones."""
    name: str

    def correct(self, records: Sequence[SampleRecord], noisy: np.ndarray) -> np.ndarray:
        ...


class ModelCorrector:
    """Eval-mode autoencoder forward pass."""

    name = "model"

    def __init__(self, model: Autoencoder, batch_size: int = 64):
        self.model = model
        self.batch_size = batch_size

    def correct(self, records: Sequence[SampleRecord], noisy: np.ndarray) -> np.ndarray:
        return self.model.predict(noisy, self.batch_size)


class IdentityCorrector:
    """Pass-through baseline: the noisy state is returned untouched."""

    name = "identity"

    def correct(self, records: Sequence[SampleRecord], noisy: np.ndarray) -> np.ndarray:
        return noisy.copy()


class OracleCorrector:
    """Upper-bound baseline: returns the clean target."""

    name = "oracle"

    def correct(self, records: Sequence[SampleRecord], noisy: np.ndarray) -> np.ndarray:
        return np.stack([dm_to_channels(r.clean) for r in records])
