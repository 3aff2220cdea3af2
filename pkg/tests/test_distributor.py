"""
Unit tests for the physical layout and remote-CX circuit construction.
"""

import numpy as np
import pytest

from src.dqcrcx.circuit import (
    Circuit,
    GateKind,
    conditional_x,
    conditional_z,
    cx,
    cz,
    h,
    measure,
    reset,
)
from src.dqcrcx.distributor import (
    BELL_TAG,
    COMMUNICATION,
    COMPUTATIONAL,
    PROTOCOL_LENGTH,
    TELEGATE_TAG,
    CommunicationQubitError,
    DistributedCircuit,
    PhysicalLayout,
    distribute,
    live_register,
    protocol_template,
    remote_cx_count,
)
from src.dqcrcx.harness import load_config
from src.dqcrcx.library import build_circuit, ghz, random_circuit, vqc
from src.dqcrcx.scheduler import (
    Assignment,
    CapacityError,
    assign,
    cut_weight,
    interaction_graph,
    naive_assignment,
    parse_network,
)
from src.dqcrcx.simulator import NoiseParams, estimate_fidelity, simulate_ideal
from src.dqcrcx.transpiler import transpile


def _distribute(circuit, network, schedule="naive"):
    net = parse_network(network)
    return distribute(circuit, assign(circuit, net, schedule), net)


class TestPhysicalLayout:
    """Test global qubit numbering."""

    def test_blocks(self):
        """Test computational-then-communication blocks per QPU."""
        layout = PhysicalLayout(parse_network("4+2,2+1"))
        assert layout.offsets == (0, 6)
        assert layout.total_qubits == 9
        assert layout.comp_index(1, 1) == 7
        assert layout.comm_index(1, 0) == 8
        assert layout.comm_indices(0) == [4, 5]
        assert layout.computational_indices() == [0, 1, 2, 3, 6, 7]
        assert layout.communication_indices() == [4, 5, 8]

    def test_roles(self):
        """Test qpu_of and role lookups."""
        layout = PhysicalLayout(parse_network("2x4+2"))
        assert layout.qpu_of(5) == 0
        assert layout.qpu_of(6) == 1
        assert layout.role(3) == COMPUTATIONAL
        assert layout.role(10) == COMMUNICATION
        with pytest.raises(IndexError):
            layout.qpu_of(12)
        with pytest.raises(IndexError):
            layout.comm_index(0, 2)

    def test_logical_map(self, two_qpus):
        """Test the logical-to-global map of an assignment."""
        layout = PhysicalLayout(two_qpus)
        assignment = Assignment(((1, 0), (0, 2), (1, 3)))
        assert layout.logical_map(assignment) == [6, 2, 9]


class TestProtocolTemplate:
    """Test the eleven-instruction remote CX."""

    def test_exact_sequence(self):
        """Test instruction order, operands and clbits."""
        protocol = protocol_template(0, 1, 2, 3, 4, 5)
        expected = [
            h(2),
            cx(2, 3),
            cx(0, 2),
            cx(3, 1),
            measure(2, 4),
            conditional_x(1, 4),
            h(3),
            measure(3, 5),
            conditional_z(0, 5),
            reset(2),
            reset(3),
        ]
        assert len(protocol) == PROTOCOL_LENGTH
        assert [(i.kind, i.qubits, i.clbit) for i in protocol] == [
            (i.kind, i.qubits, i.clbit) for i in expected
        ]

    def test_tags(self):
        """Test that Bell-pair creation and the telegate body are tagged."""
        tags = [i.tag for i in protocol_template(0, 1, 2, 3, 0, 1)]
        assert tags == [BELL_TAG] * 2 + [TELEGATE_TAG] * 9

    def test_duplicates(self):
        """Test that qubits and clbits must be distinct."""
        with pytest.raises(ValueError):
            protocol_template(0, 1, 1, 3, 0, 1)
        with pytest.raises(ValueError):
            protocol_template(0, 1, 2, 3, 0, 0)

    def test_bell_then_cx_on_plus_zero(self):
        """Test that the protocol turns |+0> into a Bell pair."""
        distributed = _distribute(Circuit(2).extend([h(0), cx(0, 1)]), "2x1+1")
        ideal = np.array([1, 0, 0, 1]) / np.sqrt(2)
        estimate = estimate_fidelity(distributed, ideal, NoiseParams.noiseless(), 40, shortcut=False)
        assert estimate.mean == pytest.approx(1.0, abs=1e-9)


class TestDistribute:
    """Test distributed circuit construction."""

    @pytest.mark.parametrize(
        "network,remote,total",
        [("2x4+2", 1, 12), ("4x2+2", 3, 16), ("8x1+2", 7, 24)],
    )
    def test_ghz_rows(self, ghz8, network, remote, total):
        """Test remote CX counts and widths of the GHZ-8 rows."""
        distributed = _distribute(ghz8, network)
        assert distributed.remote_cx_count == remote
        assert remote_cx_count(distributed) == remote
        assert distributed.circuit.num_qubits == total
        assert distributed.circuit.num_clbits == 2 * remote
        assert distributed.protocol_clbits == 2 * remote
        distributed.validate()

    def test_summary(self, ghz8):
        """Test the summary counters."""
        summary = _distribute(ghz8, "2x4+2").summary()
        assert summary["total_qubits"] == 12
        assert summary["remote_cx"] == 1
        assert summary["instructions"] == 8 - 1 + PROTOCOL_LENGTH
        assert summary["bell_instructions"] == 2
        assert summary["telegate_instructions"] == 9
        assert summary["clbits"] == 2

    def test_all_local(self):
        """Test that a circuit on one QPU is only widened."""
        circuit = ghz(4)
        distributed = _distribute(circuit, "2x4+0")
        assert distributed.remote_cx_count == 0
        assert distributed.circuit.instructions == circuit.instructions
        assert distributed.circuit.num_qubits == 8

    def test_missing_communication_qubits(self, ghz8):
        """Test that a remote CX needs communication qubits on both sides."""
        with pytest.raises(CommunicationQubitError):
            _distribute(ghz8, "2x4+0")

    def test_errors(self, two_qpus):
        """Test capacity, width and untranspiled-gate errors."""
        with pytest.raises(CapacityError):
            distribute(ghz(9), Assignment(tuple((0, i) for i in range(9))), two_qpus)
        with pytest.raises(ValueError):
            distribute(ghz(4), naive_assignment(3, two_qpus), two_qpus)
        crossing = Circuit(5).append(cz(0, 4))
        with pytest.raises(ValueError):
            distribute(crossing, naive_assignment(5, two_qpus), two_qpus)

    def test_remote_count_is_cut_weight(self, two_qpus):
        """Test that every cut CX becomes exactly one protocol."""
        for seed in range(4):
            circuit = random_circuit(8, seed=seed)
            for schedule in ("naive", "gp"):
                assignment = assign(circuit, two_qpus, schedule, seed)
                distributed = distribute(circuit, assignment, two_qpus)
                assert distributed.remote_cx_count == cut_weight(
                    interaction_graph(circuit), assignment
                )
                assert distributed.circuit.count_gates({GateKind.CONDITIONAL_X}) == distributed.remote_cx_count

    def test_validate_rejects_spanning_gates(self, two_qpus):
        """Test that validate flags a CX across QPUs that is not a Bell gate."""
        layout = PhysicalLayout(two_qpus)
        bad = DistributedCircuit(Circuit(12).append(cx(0, 6)), layout, naive_assignment(1, two_qpus), 0)
        with pytest.raises(ValueError):
            bad.validate()


class TestCommunicationQubits:
    """Test communication qubit reuse and its effect on depth."""

    def test_parallel_protocols_use_distinct_pairs(self, two_qpus):
        """Test that independent remote CX gates take different comm qubits."""
        circuit = Circuit(8).extend([cx(0, 4), cx(1, 5)])
        distributed = distribute(circuit, naive_assignment(8, two_qpus), two_qpus)
        first, second = distributed.circuit.instructions[1], distributed.circuit.instructions[12]
        assert first.qubits == (4, 10)
        assert second.qubits == (5, 11)
        assert distributed.circuit.depth() == 6

    def test_single_pair_serialises(self):
        """Test that one comm qubit per QPU forces protocols to queue."""
        circuit = Circuit(8).extend([cx(0, 4), cx(1, 5)])
        net = parse_network("2x4+1")
        distributed = distribute(circuit, naive_assignment(8, net), net)
        assert distributed.circuit.depth() > 6
        distributed.validate()

    def test_depth_non_increasing_in_comm_qubits(self):
        """Test depth as comm qubits grow from one to three per QPU."""
        circuit = random_circuit(12, seed=12, two_qubit_gates=36, one_qubit_gates=36)
        depths = []
        for comm in (1, 2, 3):
            distributed = _distribute(circuit, f"4x3+{comm}", "gp")
            depths.append(distributed.circuit.depth())
        assert depths[0] >= depths[1] >= depths[2]


class TestNoiselessCorrectness:
    """Test that distributed circuits reproduce the ideal state without noise."""

    @pytest.mark.parametrize("network", ["2x2+1", "4x1+1", "4x1+2"])
    def test_ghz(self, network):
        """Test GHZ-4 on several networks, simulating every branch."""
        circuit = ghz(4)
        estimate = estimate_fidelity(
            _distribute(circuit, network), simulate_ideal(circuit), NoiseParams.noiseless(), 30, shortcut=False
        )
        assert estimate.mean == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_prepared_states(self, seed):
        """Test random circuits and ansatz states against their ideal state."""
        for circuit in (random_circuit(4, seed=seed), transpile(vqc(4, 2, seed=seed))):
            for schedule in ("naive", "gp"):
                distributed = _distribute(circuit, "4x1+1", schedule)
                estimate = estimate_fidelity(
                    distributed, simulate_ideal(circuit), NoiseParams.noiseless(), 20, seed=seed, shortcut=False
                )
                assert estimate.mean == pytest.approx(1.0, abs=1e-9)

    def test_packaged_grid(self):
        """Test every grid row under both schedules on every measurement branch."""
        for cfg in load_config():
            circuit = transpile(build_circuit(cfg.circuit))
            ideal = simulate_ideal(circuit)
            for schedule in ("naive", "gp"):
                distributed = distribute(circuit, assign(circuit, cfg.network, schedule), cfg.network)
                estimate = estimate_fidelity(distributed, ideal, NoiseParams.noiseless(), 8, seed=1)
                assert estimate.mean == pytest.approx(1.0, abs=1e-9), (cfg.id, schedule)

    def test_fifty_random_circuits(self):
        """Test seeded random circuits of two to eight qubits."""
        for seed in range(50):
            n = 2 + seed % 7
            network = f"2x{(n + 1) // 2}+1" if seed % 2 else f"{n}x1+1"
            circuit = random_circuit(n, seed=1000 + seed)
            distributed = _distribute(circuit, network, "gp" if seed % 3 else "naive")
            estimate = estimate_fidelity(distributed, simulate_ideal(circuit), NoiseParams.noiseless(), 6, seed=seed)
            assert estimate.mean == pytest.approx(1.0, abs=1e-9), (seed, network)


class TestLiveRegister:
    """Test relabelling onto the live qubits of a circuit."""

    def test_sequential_protocols_share_two_slots(self):
        """Test GHZ-8 on eight single-slot QPUs."""
        distributed = _distribute(ghz(8), "8x1+2")
        compact, logical_map = live_register(distributed.circuit, distributed.logical_map)
        assert distributed.circuit.num_qubits == 24
        assert compact.num_qubits == 10
        assert logical_map == list(range(8))

    def test_order_kinds_and_clbits_kept(self):
        """Test that only qubit labels change."""
        distributed = _distribute(random_circuit(6, seed=3), "3x2+2", "gp")
        compact, _ = live_register(distributed.circuit, distributed.logical_map)
        assert len(compact) == len(distributed.circuit)
        assert compact.num_clbits == distributed.circuit.num_clbits
        for before, after in zip(distributed.circuit, compact):
            assert (before.kind, before.clbit, before.tag, before.theta) == (
                after.kind,
                after.clbit,
                after.tag,
                after.theta,
            )
        assert compact.num_qubits <= 6 + 2

    def test_logical_qubits_move_to_front(self):
        """Test that logical qubit k lands on slot k."""
        circuit = Circuit(4).extend([h(3), cx(3, 1)])
        compact, logical_map = live_register(circuit, [3, 1])
        assert list(compact) == [h(0), cx(0, 1)]
        assert compact.num_qubits == 2
        assert logical_map == [0, 1]

    def test_slot_reuse_after_reset(self):
        """Test that reset slots are reused and live ones are not."""
        circuit = Circuit(4).extend([reset(1), h(2), h(3)])
        compact, _ = live_register(circuit, [0])
        assert list(compact) == [reset(1), h(1), h(2)]
        assert compact.num_qubits == 3

    def test_monolithic_identity(self):
        """Test that a circuit over logical qubits only is unchanged."""
        circuit = transpile(ghz(5))
        compact, logical_map = live_register(circuit, range(5))
        assert compact == circuit
        assert logical_map == list(range(5))

    def test_repeated_logical_qubit(self):
        """Test that a logical map must be injective."""
        with pytest.raises(ValueError):
            live_register(Circuit(3), [0, 0])
