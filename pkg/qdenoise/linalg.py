"""
Dense complex matrix kernel.

Thin, validated wrappers around numpy for everything the simulator and the
fidelity metrics need: products, Kronecker products, Hermitian
eigendecomposition and the PSD square root. Matrices are plain
``complex128`` arrays; every public function returns a new array.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np
import numpy.typing as npt

CMat = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


class NotHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


class NotPositiveSemidefiniteError(ValueError):
    """Raised when a matrix has an eigenvalue below -PSD_TOL."""


class EigenDecompositionError(ArithmeticError):
    """Raised when the Hermitian eigensolver fails to converge."""


def as_cmat(a) -> CMat:
    """Coerces ``a`` to a 2-D complex128 array, rejecting anything else."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got shape {m.shape}.")
    return m


def _ensure_finite(m: CMat, what: str) -> CMat:
    if not np.all(np.isfinite(m)):
        raise ArithmeticError(f"{what} produced non-finite entries.")
    return m


def matmul(a: CMat, b: CMat) -> CMat:
    """Standard complex matrix product ``a @ b``."""
    a, b = as_cmat(a), as_cmat(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"Cannot multiply {a.shape} by {b.shape}: inner dimensions differ.")
    return _ensure_finite(a @ b, "matmul")


def kron(a: CMat, b: CMat) -> CMat:
    """Kronecker product with dims ``(a.rows * b.rows, a.cols * b.cols)``."""
    return _ensure_finite(np.kron(as_cmat(a), as_cmat(b)), "kron")


def dagger(a: CMat) -> CMat:
    return as_cmat(a).conj().T


def frob_inner(a: CMat, b: CMat) -> complex:
    """Frobenius inner product ``sum(conj(a) * b)``."""
    a, b = as_cmat(a), as_cmat(b)
    if a.shape != b.shape:
        raise ValueError(f"Shape mismatch for inner product: {a.shape} vs {b.shape}.")
    return complex(np.vdot(a, b))


def frob_norm(a: CMat) -> float:
    return float(np.linalg.norm(as_cmat(a), "fro"))


def hermiticity_error(a: CMat) -> float:
    """Relative deviation ``||A - A^H||_F / ||A||_F`` (absolute when ``A`` is zero)."""
    a = as_cmat(a)
    diff = np.linalg.norm(a - a.conj().T, "fro")
    norm = np.linalg.norm(a, "fro")
    return float(diff / norm) if norm > 0 else float(diff)


def hermitian_eig(a: CMat) -> Tuple[npt.NDArray[np.float64], CMat]:
    """
    Eigendecomposition ``A = V diag(w) V^H`` of a Hermitian matrix.

    Eigenvalues are real and returned in ascending order; ``V`` is unitary.
    The input is symmetrised before factorisation so round-off in the
    imaginary part of the diagonal does not leak into the spectrum.
    """
    a = as_cmat(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"Eigendecomposition needs a square matrix, got {a.shape}.")
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise NotHermitianError(f"Matrix is not Hermitian (relative error {err:.3e}).")
    try:
        w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    except np.linalg.LinAlgError as e:
        raise EigenDecompositionError(f"Hermitian eigensolver did not converge: {e}") from e
    return w.astype(np.float64), v.astype(np.complex128)


def sqrt_psd(a: CMat) -> CMat:
    """
    Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-PSD_TOL, 0)`` are clamped to zero; anything more
    negative is rejected.
    """
    w, v = hermitian_eig(a)
    if w.size and w[0] < -PSD_TOL:
        raise NotPositiveSemidefiniteError(f"Matrix is not PSD (min eigenvalue {w[0]:.3e}).")
    root = np.sqrt(np.clip(w, 0.0, None))
    b = (v * root) @ v.conj().T
    return _ensure_finite(0.5 * (b + b.conj().T), "sqrt_psd")
