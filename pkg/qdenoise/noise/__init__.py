"""
Noise channels package.

Provides the NoiseChannel protocol and concrete single-qubit channels for:
- bit flip
- depolarizing
- amplitude damping
- phase damping

Mixed noise is not a channel of its own; apply_noise resolves it per qubit.
"""

from typing import Dict, Optional

from .base import CPTPCheck, KrausSet, NoiseChannel, NoiseKind, NoiseSpec, STANDARD_LEVELS
from .channels import (
    AmplitudeDampingChannel,
    BitflipChannel,
    DepolarizingChannel,
    PhaseDampingChannel,
)

# Registry of base channels: kind -> channel instance
_CHANNEL_REGISTRY: Optional[Dict[NoiseKind, NoiseChannel]] = None


def get_channel_registry() -> Dict[NoiseKind, NoiseChannel]:
    """Returns the mapping of base noise kind to its channel instance."""
    global _CHANNEL_REGISTRY
    if _CHANNEL_REGISTRY is None:
        _CHANNEL_REGISTRY = {
            NoiseKind.BITFLIP: BitflipChannel(),
            NoiseKind.DEPOLARIZING: DepolarizingChannel(),
            NoiseKind.AMPLITUDE_DAMPING: AmplitudeDampingChannel(),
            NoiseKind.PHASE_DAMPING: PhaseDampingChannel(),
        }
    return _CHANNEL_REGISTRY


from .apply import apply_channel_on_qubit, apply_noise, kraus_for, validate_cptp  # noqa: E402

__all__ = [
    "CPTPCheck",
    "KrausSet",
    "NoiseChannel",
    "NoiseKind",
    "NoiseSpec",
    "STANDARD_LEVELS",
    "BitflipChannel",
    "DepolarizingChannel",
    "AmplitudeDampingChannel",
    "PhaseDampingChannel",
    "get_channel_registry",
    "kraus_for",
    "validate_cptp",
    "apply_channel_on_qubit",
    "apply_noise",
]
