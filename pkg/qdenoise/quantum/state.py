"""
Density matrices and the noiseless simulator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import CMat, as_cmat, hermiticity_error, hermitian_eig, matmul
from .circuits import Circuit
from .gates import gate_unitary

DM_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A ``2^n x 2^n`` Hermitian, PSD, unit-trace matrix."""
    num_qubits: int
    mat: CMat

    def __post_init__(self):
        mat = as_cmat(self.mat)
        dim = 2 ** self.num_qubits
        if mat.shape != (dim, dim):
            raise ValueError(f"A {self.num_qubits}-qubit state needs shape ({dim}, {dim}), got {mat.shape}.")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    @classmethod
    def zero_state(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2 ** num_qubits
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[0, 0] = 1.0
        return cls(num_qubits, mat)

    @classmethod
    def from_statevector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        num_qubits = int(round(np.log2(psi.size)))
        return cls(num_qubits, np.outer(psi, psi.conj()))

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def invariant_violations(self, tol: float = DM_TOL) -> list[str]:
        """Lists every broken density-matrix invariant; empty when the state is valid."""
        problems = []
        if not np.all(np.isfinite(self.mat)):
            return ["non-finite entries"]
        herm = hermiticity_error(self.mat)
        if herm > tol:
            problems.append(f"not Hermitian (relative error {herm:.3e})")
            return problems
        tr = self.trace()
        if abs(tr - 1.0) > tol:
            problems.append(f"trace {tr.real:.12f} != 1")
        w, _ = hermitian_eig(self.mat)
        if w[0] < -tol:
            problems.append(f"negative eigenvalue {w[0]:.3e}")
        return problems

    def is_valid(self, tol: float = DM_TOL) -> bool:
        return not self.invariant_violations(tol)


def simulate_clean(c: Circuit) -> DensityMatrix:
    """Evolves ``|0...0><0...0|`` through every gate as ``rho <- U rho U^H``."""
    c.validate()
    rho = DensityMatrix.zero_state(c.num_qubits).mat
    for layer in c.layers:
        for g in layer:
            u = gate_unitary(g, c.num_qubits)
            rho = matmul(matmul(u, rho), u.conj().T)
    return DensityMatrix(c.num_qubits, 0.5 * (rho + rho.conj().T))
