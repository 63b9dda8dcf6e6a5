"""
Gate definitions, random circuit generation and noiseless density-matrix
simulation.
"""

from .rng import derive_seed, make_rng
from .gates import GateKind, gate_matrix, gate_unitary, embed_single_qubit
from .circuits import GateOp, Circuit, random_circuit
from .state import DensityMatrix, simulate_clean

__all__ = [
    "derive_seed",
    "make_rng",
    "GateKind",
    "gate_matrix",
    "gate_unitary",
    "embed_single_qubit",
    "GateOp",
    "Circuit",
    "random_circuit",
    "DensityMatrix",
    "simulate_clean",
]
