"""
Benchmark circuit generators: GHZ, Grover, VQC and random circuits.

All generators are pure functions of their arguments. Seeded families draw
from `numpy.random.default_rng(seed)`, so the same arguments always give the
same instruction list.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Optional

import numpy as np

from .circuit import Circuit, cx, h, mcz, rz, ry, x

logger = logging.getLogger(__name__)

FAMILIES = ("ghz", "grover", "vqc", "random")

DEFAULT_VQC_LAYERS = 2


def ghz(n: int) -> Circuit:
    if n < 2:
        raise ValueError(f"GHZ needs at least 2 qubits, got {n}")
    return Circuit(n).extend([h(0)] + [cx(i, i + 1) for i in range(n - 1)])


def default_grover_iterations(n: int) -> int:
    return max(1, math.floor(math.pi / 4 * math.sqrt(2**n)))


def _check_bitstring(marked: str, n: int) -> None:
    if len(marked) != n or any(ch not in "01" for ch in marked):
        raise ValueError(f"marked state must be a {n}-character bitstring, got {marked!r}")


def _flip_zeros(marked: str, n: int) -> list:
    # marked[0] is the most significant qubit (n - 1)
    return [x(n - 1 - i) for i, bit in enumerate(marked) if bit == "0"]


def grover(n: int, marked: Optional[str] = None, iterations: Optional[int] = None) -> Circuit:
    """
    Grover search for a single marked basis state.

    Args:
        n: Number of qubits (>= 2)
        marked: Bitstring of length n, most significant qubit first. Defaults to all ones.
        iterations: Oracle + diffuser repetitions. Defaults to floor(pi/4 * sqrt(2**n)).
    """
    if n < 2:
        raise ValueError(f"Grover needs at least 2 qubits, got {n}")
    marked = "1" * n if marked is None else marked
    _check_bitstring(marked, n)
    iterations = default_grover_iterations(n) if iterations is None else iterations
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")

    everyone = list(range(n))
    insts = [h(q) for q in everyone]
    for _ in range(iterations):
        flips = _flip_zeros(marked, n)
        insts += flips + [mcz(*everyone)] + flips
        insts += [h(q) for q in everyone] + [x(q) for q in everyone]
        insts += [mcz(*everyone)]
        insts += [x(q) for q in everyone] + [h(q) for q in everyone]
    return Circuit(n).extend(insts)


def grover_success_probability(n: int, iterations: int) -> float:
    """Closed-form probability of reading the marked state."""
    theta = math.asin(2 ** (-n / 2))
    return math.sin((2 * iterations + 1) * theta) ** 2


def vqc(n: int, layers: int = DEFAULT_VQC_LAYERS, seed: int = 0) -> Circuit:
    """Hardware-efficient ansatz: RY+RZ on every qubit, then a CX chain, per layer."""
    if n < 2:
        raise ValueError(f"VQC needs at least 2 qubits, got {n}")
    if layers < 1:
        raise ValueError(f"VQC needs at least 1 layer, got {layers}")
    rng = np.random.default_rng(seed)
    insts = []
    for _ in range(layers):
        angles = rng.uniform(0.0, 2 * math.pi, size=(n, 2))
        for q in range(n):
            insts.append(ry(q, float(angles[q, 0])))
            insts.append(rz(q, float(angles[q, 1])))
        insts += [cx(i, i + 1) for i in range(n - 1)]
    return Circuit(n).extend(insts)


def random_circuit(
    n: int,
    seed: int = 0,
    two_qubit_gates: Optional[int] = None,
    one_qubit_gates: Optional[int] = None,
) -> Circuit:
    """
    Random interleaving of single-qubit gates from {X, H, RZ} and CX gates.

    Gate counts default to 3n each.
    """
    if n < 2:
        raise ValueError(f"random circuits need at least 2 qubits, got {n}")
    two_qubit_gates = 3 * n if two_qubit_gates is None else two_qubit_gates
    one_qubit_gates = 3 * n if one_qubit_gates is None else one_qubit_gates
    if two_qubit_gates < 0 or one_qubit_gates < 0:
        raise ValueError("gate counts must be non-negative")

    rng = np.random.default_rng(seed)
    order = np.array([2] * two_qubit_gates + [1] * one_qubit_gates, dtype=int)
    rng.shuffle(order)

    insts = []
    for arity in order:
        if arity == 2:
            control, target = rng.choice(n, size=2, replace=False)
            insts.append(cx(int(control), int(target)))
            continue
        q = int(rng.integers(n))
        choice = int(rng.integers(3))
        if choice == 0:
            insts.append(x(q))
        elif choice == 1:
            insts.append(h(q))
        else:
            insts.append(rz(q, float(rng.uniform(0.0, 2 * math.pi))))
    return Circuit(n).extend(insts)


@dataclass(frozen=True)
class CircuitSpec:
    family: str
    num_qubits: int
    seed: int = 0
    marked: Optional[str] = None
    iterations: Optional[int] = None
    layers: int = DEFAULT_VQC_LAYERS
    two_qubit_gates: Optional[int] = None
    one_qubit_gates: Optional[int] = None

    def __post_init__(self):
        family = self.family.lower()
        if family not in FAMILIES:
            raise ValueError(f"unknown circuit family {self.family!r}, expected one of {FAMILIES}")
        object.__setattr__(self, "family", family)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CircuitSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown circuit fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def build(self) -> Circuit:
        if self.family == "ghz":
            return ghz(self.num_qubits)
        if self.family == "grover":
            return grover(self.num_qubits, self.marked, self.iterations)
        if self.family == "vqc":
            return vqc(self.num_qubits, self.layers, self.seed)
        return random_circuit(
            self.num_qubits, self.seed, self.two_qubit_gates, self.one_qubit_gates
        )

    @property
    def label(self) -> str:
        return f"{self.family}-{self.num_qubits}"


def build_circuit(spec: CircuitSpec) -> Circuit:
    circuit = spec.build()
    logger.info(
        f"Built {spec.label} circuit: {len(circuit)} instructions, depth {circuit.depth()}"
    )
    return circuit
