"""
Unit tests for the benchmark circuit generators.
"""

import math

import numpy as np
import pytest

from src.dqcrcx.circuit import GateKind, cx, h
from src.dqcrcx.library import (
    CircuitSpec,
    build_circuit,
    default_grover_iterations,
    ghz,
    grover,
    grover_success_probability,
    random_circuit,
    vqc,
)
from src.dqcrcx.simulator import simulate_ideal
from src.dqcrcx.transpiler import transpile


class TestGHZ:
    """Test GHZ preparation circuits."""

    def test_three_qubits(self):
        """Test the instruction list of a 3-qubit GHZ circuit."""
        assert list(ghz(3)) == [h(0), cx(0, 1), cx(1, 2)]

    def test_eight_qubits(self):
        """Test gate counts and depth of GHZ(8)."""
        circuit = ghz(8)
        assert circuit.count_gates({GateKind.H}) == 1
        assert circuit.count_gates({GateKind.CX}) == 7
        assert circuit.depth() == 8

    def test_ideal_state(self):
        """Test that only |0...0> and |1...1> are populated."""
        state = simulate_ideal(ghz(6))
        probs = np.abs(state) ** 2
        assert probs[0] == pytest.approx(0.5)
        assert probs[-1] == pytest.approx(0.5)
        assert np.count_nonzero(probs > 1e-12) == 2

    def test_too_small(self):
        """Test that GHZ needs two qubits."""
        with pytest.raises(ValueError):
            ghz(1)


class TestGrover:
    """Test Grover search circuits."""

    def test_two_qubits_exact(self):
        """Test that one iteration on two qubits finds the marked state exactly."""
        state = simulate_ideal(grover(2, "11", 1))
        assert abs(state[3]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_default_iterations(self):
        """Test the default iteration count floor(pi/4 * sqrt(2**n))."""
        assert default_grover_iterations(4) == 3
        assert grover(4).count_gates({GateKind.MCZ}) == 6

    def test_success_probability_closed_form(self):
        """Test the ideal success probability against sin^2((2k+1) theta)."""
        expected = grover_success_probability(4, 3)
        assert expected == pytest.approx(0.961, abs=1e-3)
        state = simulate_ideal(grover(4, "1111", 3))
        assert abs(state[15]) ** 2 == pytest.approx(expected, abs=1e-9)

    def test_marked_bitstring_order(self):
        """Test that the marked string is read most significant qubit first."""
        state = simulate_ideal(transpile(grover(4, "1010", 3)))
        assert int(np.argmax(np.abs(state))) == int("1010", 2)
        assert abs(state[10]) ** 2 == pytest.approx(grover_success_probability(4, 3), abs=1e-9)

    def test_malformed_bitstring(self):
        """Test that marked strings must be n binary digits."""
        with pytest.raises(ValueError):
            grover(3, "10")
        with pytest.raises(ValueError):
            grover(2, "1x")
        with pytest.raises(ValueError):
            grover(2, "11", 0)


class TestVQC:
    """Test the hardware-efficient ansatz."""

    def test_structure(self):
        """Test rotation and CX counts of a single layer."""
        circuit = vqc(8, layers=1, seed=0)
        assert circuit.count_gates({GateKind.RY, GateKind.RZ}) == 16
        assert circuit.count_gates({GateKind.CX}) == 7

    def test_deterministic(self):
        """Test that the same arguments give the same circuit."""
        assert vqc(6, 2, seed=5) == vqc(6, 2, seed=5)
        assert vqc(6, 2, seed=5) != vqc(6, 2, seed=6)

    def test_angles_in_range(self):
        """Test that angles are drawn from [0, 2pi)."""
        for inst in vqc(4, 3, seed=1):
            if inst.theta is not None:
                assert 0.0 <= inst.theta < 2 * math.pi


class TestRandomCircuit:
    """Test random circuit generation."""

    def test_counts(self):
        """Test the requested gate counts and the 3n defaults."""
        circuit = random_circuit(8, seed=1, two_qubit_gates=24, one_qubit_gates=10)
        assert circuit.count_gates({GateKind.CX}) == 24
        assert len(circuit) == 34
        assert random_circuit(5, seed=0).count_gates({GateKind.CX}) == 15

    def test_deterministic(self):
        """Test that the same seed gives the same circuit."""
        assert random_circuit(8, seed=3) == random_circuit(8, seed=3)

    def test_single_qubit_kinds(self):
        """Test that only X, H, RZ and CX appear."""
        kinds = random_circuit(6, seed=2).kinds()
        assert kinds <= {GateKind.X, GateKind.H, GateKind.RZ, GateKind.CX}

    def test_no_two_qubit_gates(self):
        """Test a circuit with single-qubit gates only."""
        circuit = random_circuit(4, seed=0, two_qubit_gates=0)
        assert circuit.count_gates({GateKind.CX}) == 0

    def test_negative_counts(self):
        """Test that negative gate counts are rejected."""
        with pytest.raises(ValueError):
            random_circuit(4, two_qubit_gates=-1)


class TestCircuitSpec:
    """Test circuit specs as used in configuration files."""

    def test_from_dict_builds(self):
        """Test that a spec dictionary builds the matching circuit."""
        spec = CircuitSpec.from_dict({"family": "GHZ", "num_qubits": 5})
        assert spec.family == "ghz"
        assert spec.label == "ghz-5"
        assert build_circuit(spec) == ghz(5)

    def test_grover_fields(self):
        """Test that family parameters reach the generator."""
        spec = CircuitSpec.from_dict(
            {"family": "grover", "num_qubits": 4, "marked": "0110", "iterations": 1}
        )
        assert spec.build() == grover(4, "0110", 1)
        assert spec.to_dict()["marked"] == "0110"

    def test_unknown_family_and_field(self):
        """Test validation of family names and field names."""
        with pytest.raises(ValueError):
            CircuitSpec("qft", 4)
        with pytest.raises(ValueError):
            CircuitSpec.from_dict({"family": "ghz", "num_qubits": 4, "depth": 3})
