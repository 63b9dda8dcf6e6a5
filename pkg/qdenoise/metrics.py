"""
Quantum-state comparison: Uhlmann fidelity, the Frobenius surrogate, purity,
and projection of arbitrary matrices onto the set of density matrices.

Fidelity convention: ``F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`` (squared
form, so a pure ``rho = |psi><psi|`` gives ``<psi|sigma|psi>``). Pass
``squared=False`` for the root form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import CMat, as_cmat, frob_inner, frob_norm, hermitian_eig, sqrt_psd
from .quantum.state import DensityMatrix

ZERO_NORM = 1e-30
RANK_TOL = 1e-12


class ProjectionError(ValueError):
    """Raised when a matrix has no positive spectrum left to renormalise."""


@dataclass
class FidelityReportRow:
    """One row of a fidelity table, grouped by noise kind or level."""
    group: str
    noisy_fidelity: float
    corrected_fidelity: float
    improvement: float
    count: int = 0
    max_improvement: float = 0.0

    @property
    def relative_improvement(self) -> float:
        return self.improvement / self.noisy_fidelity if self.noisy_fidelity > 0 else 0.0


def _significant(w: np.ndarray) -> np.ndarray:
    """Eigenvalues above round-off relative to the largest one."""
    return w[w > RANK_TOL * max(float(w[-1]), 0.0)]


def _pure_vector(rho: DensityMatrix):
    """Dominant eigenvector of ``rho`` when it has numerical rank one, else None."""
    w, v = hermitian_eig(rho.mat)
    return v[:, -1] if len(_significant(w)) == 1 else None


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix, squared: bool = True) -> float:
    if rho.mat.shape != sigma.mat.shape:
        raise ValueError(f"Dimension mismatch: {rho.mat.shape} vs {sigma.mat.shape}.")
    for pure, other in ((rho, sigma), (sigma, rho)):
        psi = _pure_vector(pure)
        if psi is not None:
            value = min(1.0, max(0.0, float(np.real(np.vdot(psi, other.mat @ psi)))))
            return value if squared else float(np.sqrt(value))
    root = sqrt_psd(rho.mat)
    inner = root @ sigma.mat @ root
    w, _ = hermitian_eig(0.5 * (inner + inner.conj().T))
    value = float(np.sum(np.sqrt(_significant(w))))
    if squared:
        value *= value
    return min(1.0, max(0.0, value))


def surrogate_fidelity(rho: CMat, sigma: CMat) -> float:
    """Normalised Frobenius inner product ``Re<rho, sigma> / (|rho|_F |sigma|_F)``."""
    rho, sigma = as_cmat(rho), as_cmat(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"Shape mismatch: {rho.shape} vs {sigma.shape}.")
    norm_rho, norm_sigma = frob_norm(rho), frob_norm(sigma)
    if norm_rho < ZERO_NORM or norm_sigma < ZERO_NORM:
        return 0.0
    return float(np.clip(frob_inner(rho, sigma).real / (norm_rho * norm_sigma), -1.0, 1.0))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.vdot(rho.mat, rho.mat)))


def project_to_dm(m: CMat) -> DensityMatrix:
    """
    Nearest unit-trace PSD matrix along the clipped spectrum: Hermitise,
    clip negative eigenvalues to zero, renormalise the trace.
    """
    m = as_cmat(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"Projection needs a square matrix, got {m.shape}.")
    num_qubits = int(round(np.log2(m.shape[0])))
    if 2 ** num_qubits != m.shape[0]:
        raise ValueError(f"Dimension {m.shape[0]} is not a power of two.")
    herm = 0.5 * (m + m.conj().T)
    w, v = hermitian_eig(herm)
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    if total <= ZERO_NORM:
        raise ProjectionError("No positive eigenvalues left after clipping; matrix is unreconstructable.")
    out = (v * (w / total)) @ v.conj().T
    return DensityMatrix(num_qubits, 0.5 * (out + out.conj().T))


def mean_absolute_error(pred: np.ndarray, true: np.ndarray) -> float:
    pred, true = np.asarray(pred, dtype=np.float64), np.asarray(true, dtype=np.float64)
    if pred.shape != true.shape:
        raise ValueError(f"Shape mismatch: {pred.shape} vs {true.shape}.")
    return float(np.mean(np.abs(pred - true)))
