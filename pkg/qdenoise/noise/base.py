from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Protocol

import numpy as np

from ..linalg import CMat

CPTP_TOL = 1e-12
STANDARD_LEVELS = (0.05, 0.10, 0.15, 0.20)


class NoiseKind(IntEnum):
    """Channel kinds; the integer value is the u8 code stored in QDS1 records."""
    BITFLIP = 0
    DEPOLARIZING = 1
    AMPLITUDE_DAMPING = 2
    PHASE_DAMPING = 3
    MIXED = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_name(cls, name: str) -> "NoiseKind":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            known = ", ".join(k.label for k in cls)
            raise ValueError(f"Unknown noise kind '{name}'. Known kinds: {known}.") from None

    @classmethod
    def base_kinds(cls) -> List["NoiseKind"]:
        return [k for k in cls if k is not cls.MIXED]


@dataclass(frozen=True)
class NoiseSpec:
    """A channel kind plus its level ``p``."""
    kind: NoiseKind
    level: float

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"Noise level must lie in [0, 1], got {self.level}.")


@dataclass
class KrausSet:
    """Single-qubit Kraus operators of a channel."""
    ops: List[CMat] = field(default_factory=list)

    def completeness_sum(self) -> CMat:
        acc = np.zeros((2, 2), dtype=np.complex128)
        for k in self.ops:
            acc += k.conj().T @ k
        return acc


@dataclass
class CPTPCheck:
    """
    Result of a completeness check.
    - passed: whether ``||sum K^H K - I||_F <= CPTP_TOL``
    - deviation: the Frobenius deviation itself
    - error: human-readable detail when the check fails
    """
    passed: bool
    deviation: float
    error: Optional[str] = None


class NoiseChannel(Protocol):
    """Protocol for single-qubit noise channels."""
    name: str
    code: NoiseKind

    def kraus(self, level: float) -> KrausSet:
        ...
