import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdenoise.metrics import purity
from qdenoise.quantum import (
    Circuit,
    DensityMatrix,
    GateKind,
    GateOp,
    derive_seed,
    gate_matrix,
    gate_unitary,
    random_circuit,
    simulate_clean,
)
from qdenoise.quantum.gates import PAULI_X


def statevector(circuit: Circuit) -> np.ndarray:
    """Reference simulator acting on a rank-n tensor, independent of the kron embedding."""
    n = circuit.num_qubits
    psi = np.zeros((2,) * n, dtype=np.complex128)
    psi[(0,) * n] = 1.0
    for layer in circuit.layers:
        for g in layer:
            m = gate_matrix(g.kind, g.angle)
            if len(g.targets) == 1:
                psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [g.targets[0]])), 0, g.targets[0])
            else:
                q0, q1 = g.targets
                psi = np.tensordot(m.reshape(2, 2, 2, 2), psi, axes=([2, 3], [q0, q1]))
                psi = np.moveaxis(psi, [0, 1], [q0, q1])
    return psi.reshape(-1)


@pytest.mark.parametrize("kind", list(GateKind))
def test_gates_are_unitary(kind):
    m = gate_matrix(kind, 0.731 if kind.parametric else None)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-12)


def test_rotation_conventions():
    np.testing.assert_allclose(gate_matrix(GateKind.RX, math.pi), -1j * PAULI_X, atol=1e-12)
    np.testing.assert_allclose(gate_matrix(GateKind.RZ, 0.0), np.eye(2), atol=1e-12)
    with pytest.raises(ValueError, match="angle"):
        gate_matrix(GateKind.RY)
    with pytest.raises(ValueError, match="no angle"):
        gate_matrix(GateKind.H, 0.5)


def test_x_on_qubit_zero_is_most_significant():
    c = Circuit(2, [[GateOp(GateKind.X, (0,))]])
    rho = simulate_clean(c)
    # |10> is basis index 2
    assert rho.mat[2, 2] == pytest.approx(1.0)


def test_hadamard_state():
    c = Circuit(2, [[GateOp(GateKind.H, (1,))]])
    rho = simulate_clean(c)
    expected = np.zeros((4, 4))
    expected[:2, :2] = 0.5
    np.testing.assert_allclose(rho.mat, expected, atol=1e-12)


def test_cnot_control_is_first_target():
    c = Circuit(2, [[GateOp(GateKind.X, (0,))], [GateOp(GateKind.CNOT, (0, 1))]])
    assert simulate_clean(c).mat[3, 3] == pytest.approx(1.0)
    c = Circuit(2, [[GateOp(GateKind.X, (0,))], [GateOp(GateKind.CNOT, (1, 0))]])
    assert simulate_clean(c).mat[2, 2] == pytest.approx(1.0)


def test_gate_validation():
    with pytest.raises(ValueError):
        gate_unitary(GateOp(GateKind.CNOT, (1, 1)), 3)
    with pytest.raises(ValueError):
        gate_unitary(GateOp(GateKind.X, (3,)), 3)
    with pytest.raises(ValueError):
        gate_unitary(GateOp(GateKind.RX, (0,), 7.0), 3)


def test_empty_circuit_gives_zero_state():
    rho = simulate_clean(Circuit(3, []))
    np.testing.assert_array_equal(rho.mat, DensityMatrix.zero_state(3).mat)


def test_random_circuit_is_pure_function_of_seed():
    a = random_circuit(4, 6, 9, rng_seed=99)
    b = random_circuit(4, 6, 9, rng_seed=99)
    assert a.to_text() == b.to_text()
    assert 6 <= a.depth <= 9
    assert random_circuit(4, 6, 9, rng_seed=100).to_text() != a.to_text()


def test_random_circuit_layers_touch_each_qubit_once():
    c = random_circuit(5, 6, 9, rng_seed=3)
    for layer in c.layers:
        touched = [q for g in layer for q in g.targets]
        assert sorted(touched) == list(range(5))
    c.validate()


def test_random_circuit_without_two_qubit_gates():
    c = random_circuit(3, 4, 4, rng_seed=5, two_qubit_gates=False)
    assert c.two_qubit_gate_count == 0
    assert c.gate_count == 12


def test_random_circuit_rejects_bad_depths():
    with pytest.raises(ValueError):
        random_circuit(3, 5, 4, rng_seed=0)


def test_circuit_text_form_round_trips():
    c = random_circuit(3, 6, 9, rng_seed=21)
    back = Circuit.from_text(c.to_text())
    assert back.to_text() == c.to_text()
    np.testing.assert_array_equal(simulate_clean(back).mat, simulate_clean(c).mat)


def test_circuit_text_rejects_garbage():
    with pytest.raises(ValueError):
        Circuit.from_text("qubits 2 seed 0\nX 0\n")
    with pytest.raises(ValueError):
        Circuit.from_text("qubits 2\n")


def test_simulator_matches_statevector_oracle():
    for i in range(50):
        c = random_circuit(3, 6, 9, rng_seed=derive_seed(2024, i))
        psi = statevector(c)
        rho = simulate_clean(c)
        assert np.linalg.norm(rho.mat - np.outer(psi, psi.conj())) < 1e-10
        assert purity(rho) == pytest.approx(1.0, abs=1e-10)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(2, 1)
    with pytest.raises(ValueError):
        derive_seed()


def test_density_matrix_shape_check():
    with pytest.raises(ValueError):
        DensityMatrix(2, np.eye(2))


def test_invariant_violations_lists_trace_error():
    rho = DensityMatrix(1, np.eye(2))
    problems = rho.invariant_violations()
    assert problems and "trace" in problems[0]
    assert DensityMatrix.zero_state(2).is_valid()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), n=st.integers(2, 4))
def test_random_circuits_yield_valid_pure_states(seed, n):
    rho = simulate_clean(random_circuit(n, 1, 5, rng_seed=seed))
    assert rho.is_valid()
    assert purity(rho) == pytest.approx(1.0, abs=1e-10)


def test_depth_distribution_covers_range():
    depths = [random_circuit(3, 6, 9, rng_seed=seed).depth for seed in range(10000)]
    counts = np.bincount(depths, minlength=10)[6:10]
    assert counts.sum() == 10000
    assert np.all(counts >= 0.2 * 10000)
