import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdenoise.linalg import (
    NotHermitianError,
    NotPositiveSemidefiniteError,
    dagger,
    frob_inner,
    frob_norm,
    hermitian_eig,
    kron,
    matmul,
    sqrt_psd,
)

from .conftest import random_density_matrix


def test_matmul_rejects_mismatched_shapes():
    with pytest.raises(ValueError, match="inner dimensions"):
        matmul(np.eye(2), np.eye(3))


def test_kron_dims_and_identity():
    out = kron(np.eye(2), np.eye(4))
    assert out.shape == (8, 8)
    np.testing.assert_array_equal(out, np.eye(8))


def test_frob_inner_conjugates_first_argument():
    a = np.array([[1j, 0], [0, 0]])
    assert frob_inner(a, a) == pytest.approx(1.0)
    assert frob_inner(a, np.array([[1, 0], [0, 0]])) == pytest.approx(-1j)


def test_frob_norm_of_identity():
    assert frob_norm(np.eye(4)) == pytest.approx(2.0)


def test_hermitian_eig_pauli_y():
    w, v = hermitian_eig(np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(dagger(v) @ v, np.eye(2), atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_sqrt_psd_of_diagonal():
    root = sqrt_psd(np.diag([4.0, 9.0, 0.0]))
    np.testing.assert_allclose(root, np.diag([2.0, 3.0, 0.0]), atol=1e-12)


def test_sqrt_psd_rejects_negative_spectrum():
    with pytest.raises(NotPositiveSemidefiniteError):
        sqrt_psd(np.diag([1.0, -0.1]))


def test_sqrt_psd_clamps_round_off():
    root = sqrt_psd(np.diag([1.0, -1e-13]))
    np.testing.assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_eig_reconstructs_random_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    dim = 2 ** n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + dagger(a)
    w, v = hermitian_eig(h)
    np.testing.assert_allclose((v * w) @ dagger(v), h, atol=1e-10)
    np.testing.assert_allclose(dagger(v) @ v, np.eye(dim), atol=1e-10)
    assert np.all(np.diff(w) >= 0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_sqrt_psd_squares_back(seed, n):
    rho = random_density_matrix(np.random.default_rng(seed), 2 ** n)
    root = sqrt_psd(rho)
    np.testing.assert_allclose(root @ root, rho, atol=1e-10)


def test_hadamard_squares_to_identity():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    np.testing.assert_allclose(matmul(h, h), np.eye(2), atol=1e-15)


def test_kron_qubit_zero_is_most_significant():
    x = np.array([[0, 1], [1, 0]])
    e0 = np.zeros((4, 1))
    e0[0] = 1.0
    out = matmul(kron(x, np.eye(2)), e0)
    assert out[2, 0] == 1.0


def test_kron_mixed_product():
    rng = np.random.default_rng(6)
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    np.testing.assert_allclose(matmul(kron(a, b), kron(c, d)), kron(matmul(a, c), matmul(b, d)), atol=1e-10)


def test_frob_inner_orthogonal_paulis_and_symmetry():
    x = np.array([[0, 1], [1, 0]])
    z = np.array([[1, 0], [0, -1]])
    assert frob_inner(x, z) == 0
    rng = np.random.default_rng(7)
    a, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2))
    assert abs(frob_inner(a, b) - np.conj(frob_inner(b, a))) < 1e-14
    assert frob_inner(a, a).real == pytest.approx(frob_norm(a) ** 2, rel=1e-12)


def test_non_finite_input_is_rejected():
    with pytest.raises(ArithmeticError):
        matmul(np.array([[np.inf]]), np.array([[1.0]]))


def test_matmul_is_associative():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a, b, c = (rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)) for _ in range(3))
        left, right = matmul(matmul(a, b), c), matmul(a, matmul(b, c))
        assert frob_norm(left - right) <= 1e-10 * frob_norm(left)
