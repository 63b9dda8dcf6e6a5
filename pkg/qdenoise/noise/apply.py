"""
Applying Kraus maps to density matrices.
"""
from __future__ import annotations

import logging

import numpy as np

from ..linalg import frob_norm
from ..quantum.gates import embed_single_qubit
from ..quantum.rng import make_rng
from ..quantum.state import DensityMatrix
from . import get_channel_registry
from .base import CPTP_TOL, CPTPCheck, KrausSet, NoiseKind, NoiseSpec

logger = logging.getLogger(__name__)


def kraus_for(kind: NoiseKind, level: float) -> KrausSet:
    """Kraus set of a base channel at level ``p``; Mixed has no single set."""
    if kind is NoiseKind.MIXED:
        raise ValueError("Mixed noise has no single Kraus set; use apply_noise.")
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"Noise level must lie in [0, 1], got {level}.")
    return get_channel_registry()[NoiseKind(kind)].kraus(level)


def validate_cptp(k: KrausSet) -> CPTPCheck:
    if not k.ops:
        return CPTPCheck(False, float("inf"), error="Empty Kraus set")
    shapes = {op.shape for op in k.ops}
    if len(shapes) != 1:
        return CPTPCheck(False, float("inf"), error=f"Inconsistent operator shapes {sorted(shapes)}")
    dim = k.ops[0].shape[0]
    acc = sum((op.conj().T @ op for op in k.ops), np.zeros((dim, dim), dtype=np.complex128))
    deviation = frob_norm(acc - np.eye(dim))
    if deviation > CPTP_TOL:
        return CPTPCheck(False, deviation, error=f"||sum K^H K - I||_F = {deviation:.3e}")
    return CPTPCheck(True, deviation)


def apply_channel_on_qubit(rho: DensityMatrix, k: KrausSet, qubit: int) -> DensityMatrix:
    """``rho <- sum_i K_i rho K_i^H`` with each ``K_i`` embedded on ``qubit``."""
    if not 0 <= qubit < rho.num_qubits:
        raise ValueError(f"Qubit index {qubit} out of range for {rho.num_qubits} qubits.")
    out = np.zeros_like(rho.mat)
    for op in k.ops:
        full = embed_single_qubit(op, qubit, rho.num_qubits)
        out += full @ rho.mat @ full.conj().T
    return DensityMatrix(rho.num_qubits, 0.5 * (out + out.conj().T))


def apply_noise(rho: DensityMatrix, spec: NoiseSpec, rng_seed: int) -> DensityMatrix:
    """
    Applies ``spec`` independently to every qubit, in ascending index order.

    For Mixed noise each qubit draws one of the four base kinds uniformly from
    a generator seeded with ``rng_seed``.
    """
    base = NoiseKind.base_kinds()
    if spec.kind is NoiseKind.MIXED:
        rng = make_rng(rng_seed)
        kinds = [base[int(rng.integers(len(base)))] for _ in range(rho.num_qubits)]
        logger.debug("Mixed noise kinds per qubit: %s", [k.label for k in kinds])
    else:
        kinds = [spec.kind] * rho.num_qubits
    for qubit, kind in enumerate(kinds):
        rho = apply_channel_on_qubit(rho, kraus_for(kind, spec.level), qubit)
    return rho
