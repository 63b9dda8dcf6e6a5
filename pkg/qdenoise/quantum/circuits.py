"""
Circuit model and the seeded random circuit generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .gates import GateKind, SINGLE_QUBIT_KINDS, TWO_QUBIT_KINDS
from .rng import make_rng

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GateOp:
    """One gate: kind, target qubit(s) and, for rotations, the angle in radians."""
    kind: GateKind
    targets: Tuple[int, ...]
    angle: Optional[float] = None

    def validate(self, num_qubits: int) -> None:
        if len(self.targets) != self.kind.arity:
            raise ValueError(f"{self.kind.value} takes {self.kind.arity} target(s), got {self.targets}.")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"Targets of {self.kind.value} must be distinct, got {self.targets}.")
        if any(not 0 <= t < num_qubits for t in self.targets):
            raise ValueError(f"Targets {self.targets} out of range for {num_qubits} qubits.")
        if self.kind.parametric:
            if self.angle is None or not 0.0 <= self.angle < TWO_PI:
                raise ValueError(f"{self.kind.value} angle must lie in [0, 2pi), got {self.angle}.")
        elif self.angle is not None:
            raise ValueError(f"{self.kind.value} takes no angle.")

    def to_text(self) -> str:
        line = f"{self.kind.value} {','.join(str(t) for t in self.targets)}"
        if self.angle is not None:
            line += f" {self.angle!r}"
        return line

    @classmethod
    def from_text(cls, line: str) -> "GateOp":
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"Malformed gate line: '{line}'.")
        try:
            kind = GateKind(parts[0])
            targets = tuple(int(t) for t in parts[1].split(","))
            angle = float(parts[2]) if len(parts) == 3 else None
        except ValueError as e:
            raise ValueError(f"Malformed gate line: '{line}' ({e}).") from e
        return cls(kind, targets, angle)


@dataclass
class Circuit:
    """An ordered list of layers; within a layer every qubit is touched at most once."""
    num_qubits: int
    layers: List[List[GateOp]] = field(default_factory=list)
    seed: int = 0

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def two_qubit_gate_count(self) -> int:
        return sum(1 for layer in self.layers for g in layer if g.kind.arity == 2)

    def validate(self) -> None:
        for index, layer in enumerate(self.layers):
            seen = set()
            for g in layer:
                g.validate(self.num_qubits)
                if seen.intersection(g.targets):
                    raise ValueError(f"Layer {index} targets a qubit twice.")
                seen.update(g.targets)

    def to_text(self) -> str:
        """Debug form: a header line, then one gate per line with ``# layer k`` separators."""
        lines = [f"qubits {self.num_qubits} seed {self.seed}"]
        for index, layer in enumerate(self.layers):
            lines.append(f"# layer {index}")
            lines.extend(g.to_text() for g in layer)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("Empty circuit text.")
        header = lines[0].split()
        if len(header) != 4 or header[0] != "qubits" or header[2] != "seed":
            raise ValueError(f"Malformed circuit header: '{lines[0]}'.")
        circuit = cls(num_qubits=int(header[1]), seed=int(header[3]))
        for line in lines[1:]:
            if line.startswith("#"):
                circuit.layers.append([])
            elif not circuit.layers:
                raise ValueError("Gate line before the first layer marker.")
            else:
                circuit.layers[-1].append(GateOp.from_text(line))
        circuit.validate()
        return circuit


def random_circuit(
    num_qubits: int,
    depth_min: int,
    depth_max: int,
    rng_seed: int,
    two_qubit_gates: bool = True,
) -> Circuit:
    """
    Draws a random layered circuit; a pure function of its arguments.

    Each layer places, with probability 1/2, one two-qubit gate on a uniformly
    chosen ordered pair of distinct qubits, then gives every still-free qubit
    a uniformly chosen single-qubit gate (rotation angles uniform on [0, 2pi)).
    """
    if depth_min < 0 or depth_min > depth_max:
        raise ValueError(f"Invalid depth range [{depth_min}, {depth_max}].")
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be positive, got {num_qubits}.")
    if two_qubit_gates and num_qubits < 2:
        raise ValueError("Two-qubit gates need at least 2 qubits.")

    rng = make_rng(rng_seed)
    depth = int(rng.integers(depth_min, depth_max + 1))
    layers: List[List[GateOp]] = []
    for _ in range(depth):
        layer: List[GateOp] = []
        busy = set()
        if two_qubit_gates and rng.random() < 0.5:
            kind = TWO_QUBIT_KINDS[int(rng.integers(len(TWO_QUBIT_KINDS)))]
            first = int(rng.integers(num_qubits))
            second = int(rng.integers(num_qubits - 1))
            if second >= first:
                second += 1
            layer.append(GateOp(kind, (first, second)))
            busy.update((first, second))
        for q in range(num_qubits):
            if q in busy:
                continue
            kind = SINGLE_QUBIT_KINDS[int(rng.integers(len(SINGLE_QUBIT_KINDS)))]
            angle = float(rng.random() * TWO_PI) if kind.parametric else None
            layer.append(GateOp(kind, (q,), angle))
        layers.append(layer)
    return Circuit(num_qubits=num_qubits, layers=layers, seed=rng_seed)
