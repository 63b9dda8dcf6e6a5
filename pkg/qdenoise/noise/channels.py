"""
The four base channels as explicit Kraus maps.

Depolarizing follows ``rho -> (1 - p) rho + p I / 2``; bit flip is the
ensemble channel ``(1 - p) rho + p X rho X``.
"""
from __future__ import annotations

import math

import numpy as np

from ..quantum.gates import I2, PAULI_X, PAULI_Y, PAULI_Z
from .base import KrausSet, NoiseKind


def _check_level(level: float) -> None:
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"Noise level must lie in [0, 1], got {level}.")


class BitflipChannel:
    """Random X errors: ``{sqrt(1-p) I, sqrt(p) X}``."""

    name = "bitflip"
    code = NoiseKind.BITFLIP

    def kraus(self, level: float) -> KrausSet:
        _check_level(level)
        return KrausSet([math.sqrt(1.0 - level) * I2, math.sqrt(level) * PAULI_X])


class DepolarizingChannel:
    """Replaces the qubit by the maximally mixed state with probability ``p``."""

    name = "depolarizing"
    code = NoiseKind.DEPOLARIZING

    def kraus(self, level: float) -> KrausSet:
        _check_level(level)
        k0 = math.sqrt(max(0.0, 1.0 - 3.0 * level / 4.0))
        k = math.sqrt(level / 4.0)
        return KrausSet([k0 * I2, k * PAULI_X, k * PAULI_Y, k * PAULI_Z])


class AmplitudeDampingChannel:
    """Energy loss |1> -> |0> with probability ``gamma``."""

    name = "amplitude_damping"
    code = NoiseKind.AMPLITUDE_DAMPING

    def kraus(self, level: float) -> KrausSet:
        _check_level(level)
        k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - level)]], dtype=np.complex128)
        k1 = np.array([[0.0, math.sqrt(level)], [0.0, 0.0]], dtype=np.complex128)
        return KrausSet([k0, k1])


class PhaseDampingChannel:
    """Loses coherences without touching populations."""

    name = "phase_damping"
    code = NoiseKind.PHASE_DAMPING

    def kraus(self, level: float) -> KrausSet:
        _check_level(level)
        k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - level)]], dtype=np.complex128)
        k1 = np.array([[0.0, 0.0], [0.0, math.sqrt(level)]], dtype=np.complex128)
        return KrausSet([k0, k1])
