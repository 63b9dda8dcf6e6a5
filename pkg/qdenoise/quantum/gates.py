"""
Gate table and embedding of 1- and 2-qubit gates into the n-qubit space.

Conventions: qubit 0 is the most significant tensor factor (leftmost in the
Kronecker product), ``RX(t) = exp(-i t X / 2)`` and likewise for RY/RZ,
``T = diag(1, e^{i pi/4})``, ``S = diag(1, i)``. For two-qubit gates the
first target is the control (CNOT) or the first swapped qubit.
"""
from __future__ import annotations

import math
from enum import Enum
from functools import reduce
from typing import List, Optional, Sequence, TYPE_CHECKING

import numpy as np

from ..linalg import CMat, kron

if TYPE_CHECKING:
    from .circuits import GateOp


class GateKind(Enum):
    """Supported gates. The value is the name used in the text form."""
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    T = "T"
    S = "S"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"

    @property
    def arity(self) -> int:
        return 2 if self in TWO_QUBIT_KINDS else 1

    @property
    def parametric(self) -> bool:
        return self in ROTATION_KINDS


SINGLE_QUBIT_KINDS = (
    GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.T, GateKind.S,
    GateKind.RX, GateKind.RY, GateKind.RZ,
)
TWO_QUBIT_KINDS = (GateKind.CNOT, GateKind.CZ, GateKind.SWAP)
ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)

_FIXED = {
    GateKind.X: PAULI_X,
    GateKind.Y: PAULI_Y,
    GateKind.Z: PAULI_Z,
    GateKind.H: HADAMARD,
    GateKind.T: np.diag([1.0, np.exp(1j * math.pi / 4)]).astype(np.complex128),
    GateKind.S: np.diag([1.0, 1j]).astype(np.complex128),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
    GateKind.CZ: np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
    ),
}
_GENERATORS = {GateKind.RX: PAULI_X, GateKind.RY: PAULI_Y, GateKind.RZ: PAULI_Z}


def gate_matrix(kind: GateKind, angle: Optional[float] = None) -> CMat:
    """Returns the standard 2x2 (or 4x4 for two-qubit kinds) matrix of a gate."""
    if kind.parametric:
        if angle is None:
            raise ValueError(f"Gate {kind.value} needs a rotation angle.")
        # exp(-i t P / 2) = cos(t/2) I - i sin(t/2) P for any Pauli P
        half = 0.5 * angle
        return math.cos(half) * I2 - 1j * math.sin(half) * _GENERATORS[kind]
    if angle is not None:
        raise ValueError(f"Gate {kind.value} takes no angle.")
    return _FIXED[kind].copy()


def embed_single_qubit(op: CMat, qubit: int, num_qubits: int) -> CMat:
    """Tensors ``op`` on ``qubit`` with identities on every other qubit."""
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"Qubit index {qubit} out of range for {num_qubits} qubits.")
    factors = [op if q == qubit else I2 for q in range(num_qubits)]
    return reduce(kron, factors)


def _embed(matrix: CMat, targets: Sequence[int], num_qubits: int) -> CMat:
    if len(targets) == 1:
        return embed_single_qubit(matrix, targets[0], num_qubits)
    q0, q1 = targets
    dim = 2 ** num_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    units: List[List[CMat]] = [[np.zeros((2, 2), dtype=np.complex128) for _ in range(2)] for _ in range(2)]
    for r in range(2):
        for c in range(2):
            units[r][c][r, c] = 1.0
    # G = sum G[2a+b, 2c+d] |a><c| (x) |b><d|
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    coeff = matrix[2 * a + b, 2 * c + d]
                    if coeff == 0:
                        continue
                    factors = [I2] * num_qubits
                    factors[q0] = units[a][c]
                    factors[q1] = units[b][d]
                    out += coeff * reduce(kron, factors)
    return out


def gate_unitary(g: "GateOp", num_qubits: int) -> CMat:
    """Full ``2^n x 2^n`` unitary of a gate acting inside an n-qubit register."""
    if not isinstance(g.kind, GateKind):
        raise ValueError(f"Unknown gate kind {g.kind!r}.")
    g.validate(num_qubits)
    return _embed(gate_matrix(g.kind, g.angle), g.targets, num_qubits)
