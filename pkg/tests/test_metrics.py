import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdenoise.dataset import generate_dataset
from qdenoise.evaluation import correlation
from qdenoise.metrics import (
    FidelityReportRow,
    ProjectionError,
    mean_absolute_error,
    project_to_dm,
    purity,
    surrogate_fidelity,
    uhlmann_fidelity,
)
from qdenoise.noise import NoiseKind
from qdenoise.quantum import DensityMatrix

from .conftest import LEVELS, random_density_matrix, random_pure_state


def test_fidelity_of_orthogonal_and_identical_states():
    zero = DensityMatrix(1, np.diag([1.0, 0.0]))
    one = DensityMatrix(1, np.diag([0.0, 1.0]))
    assert uhlmann_fidelity(zero, one) == pytest.approx(0.0, abs=1e-12)
    assert uhlmann_fidelity(zero, zero) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_with_maximally_mixed_state():
    zero = DensityMatrix.zero_state(2)
    mixed = DensityMatrix(2, np.eye(4) / 4)
    assert uhlmann_fidelity(zero, mixed) == pytest.approx(0.25, abs=1e-12)
    assert uhlmann_fidelity(zero, mixed, squared=False) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("num_qubits", [3, 5])
def test_fidelity_pure_state_overlap(num_qubits):
    rng = np.random.default_rng(5)
    dim = 2 ** num_qubits
    worst = 0.0
    for _ in range(50):
        psi = random_pure_state(rng, dim)
        sigma = random_density_matrix(rng, dim)
        expected = (psi.conj() @ sigma @ psi).real
        value = uhlmann_fidelity(DensityMatrix.from_statevector(psi), DensityMatrix(num_qubits, sigma))
        worst = max(worst, abs(value - expected))
    assert worst <= 1e-10


def test_fidelity_full_rank_ignores_round_off_spectrum():
    rng = np.random.default_rng(8)
    rho = DensityMatrix(5, random_density_matrix(rng, 32))
    assert uhlmann_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    psi = random_pure_state(rng, 32)
    low_rank = DensityMatrix(5, 0.5 * np.outer(psi, psi.conj()) + 0.5 * random_density_matrix(rng, 32, rank=1))
    assert uhlmann_fidelity(low_rank, low_rank) == pytest.approx(1.0, abs=1e-10)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        uhlmann_fidelity(DensityMatrix.zero_state(1), DensityMatrix.zero_state(2))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fidelity_is_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    rho = DensityMatrix(2, random_density_matrix(rng, 4))
    sigma = DensityMatrix(2, random_density_matrix(rng, 4))
    f = uhlmann_fidelity(rho, sigma)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(uhlmann_fidelity(sigma, rho), abs=1e-8)


def test_surrogate_examples():
    zero = np.diag([1.0, 0.0])
    assert surrogate_fidelity(zero, zero) == pytest.approx(1.0)
    assert surrogate_fidelity(zero, np.diag([0.0, 1.0])) == pytest.approx(0.0)
    assert surrogate_fidelity(zero, -zero) == pytest.approx(-1.0)
    assert surrogate_fidelity(np.zeros((2, 2)), zero) == 0.0
    with pytest.raises(ValueError):
        surrogate_fidelity(zero, np.eye(4))


def test_purity_bounds():
    assert purity(DensityMatrix.zero_state(3)) == pytest.approx(1.0)
    assert purity(DensityMatrix(3, np.eye(8) / 8)) == pytest.approx(1 / 8)


def test_projection_is_identity_on_valid_states():
    rho = random_density_matrix(np.random.default_rng(9), 4)
    np.testing.assert_allclose(project_to_dm(rho).mat, rho, atol=1e-12)


def test_projection_clips_negative_spectrum():
    out = project_to_dm(np.diag([0.7, 0.5, -0.2, 0.0]).astype(complex))
    np.testing.assert_allclose(np.diag(out.mat).real, [0.7 / 1.2, 0.5 / 1.2, 0.0, 0.0], atol=1e-12)
    assert out.is_valid()


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_projection_of_arbitrary_matrix_is_valid(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m[0, 0] = 2.0
    assert project_to_dm(m).is_valid()


def test_projection_failures():
    with pytest.raises(ProjectionError):
        project_to_dm(-np.eye(4))
    with pytest.raises(ValueError):
        project_to_dm(np.eye(3))


def test_mean_absolute_error():
    assert mean_absolute_error(np.zeros(4), np.array([1.0, -1.0, 0.0, 2.0])) == pytest.approx(1.0)


def test_report_row_relative_improvement():
    row = FidelityReportRow("bitflip", 0.2, 0.745, 0.545)
    assert row.relative_improvement == pytest.approx(2.725)
    assert FidelityReportRow("x", 0.0, 0.5, 0.5).relative_improvement == 0.0


def test_surrogate_tracks_uhlmann_fidelity():
    dataset = generate_dataset(200, 3, (6, 9), list(NoiseKind), LEVELS, global_seed=5)
    surrogate = [surrogate_fidelity(r.clean.mat, r.noisy.mat) for r in dataset.records]
    uhlmann = [uhlmann_fidelity(r.clean, r.noisy) for r in dataset.records]
    assert correlation(surrogate, uhlmann) > 0.5


def test_fidelity_is_unitary_invariant():
    from qdenoise.quantum import random_circuit
    from qdenoise.quantum.gates import gate_unitary

    rng = np.random.default_rng(12)
    rho, sigma = random_density_matrix(rng, 4), random_density_matrix(rng, 4)
    u = np.eye(4, dtype=complex)
    for layer in random_circuit(2, 4, 4, rng_seed=1).layers:
        for g in layer:
            u = gate_unitary(g, 2) @ u
    before = uhlmann_fidelity(DensityMatrix(2, rho), DensityMatrix(2, sigma))
    after = uhlmann_fidelity(DensityMatrix(2, u @ rho @ u.conj().T), DensityMatrix(2, u @ sigma @ u.conj().T))
    assert after == pytest.approx(before, abs=1e-8)


def test_depolarized_state_purity_is_strictly_mixed():
    from qdenoise.noise import NoiseSpec, apply_noise

    noisy = apply_noise(DensityMatrix.zero_state(3), NoiseSpec(NoiseKind.DEPOLARIZING, 0.2), rng_seed=0)
    assert 1 / 8 < purity(noisy) < 1.0


def test_projection_of_diag_two_minus_one():
    out = project_to_dm(np.diag([2.0, -1.0]))
    np.testing.assert_allclose(out.mat, np.diag([1.0, 0.0]), atol=1e-12)


def test_projection_is_idempotent():
    m = np.random.default_rng(13).normal(size=(4, 4)) + 0j
    m[0, 0] = 3.0
    once = project_to_dm(m)
    np.testing.assert_allclose(project_to_dm(once.mat).mat, once.mat, atol=1e-10)
