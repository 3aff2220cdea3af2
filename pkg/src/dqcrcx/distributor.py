"""
Distributed circuit construction.

Each QPU owns a contiguous block of global qubit indices: its computational
slots first, then its communication slots. Local instructions are remapped
into that layout; every CX whose operands sit on different QPUs becomes a
remote-CX (telegate) protocol that borrows one communication qubit on each
side and returns both to |0> with explicit resets.
"""

import heapq
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .circuit import Circuit, DepthTracker, GateKind, Instruction
from .circuit import conditional_x, conditional_z, cx, h, measure, reset
from .scheduler import Assignment, CapacityError, NetworkConfig

logger = logging.getLogger(__name__)

BELL_TAG = "bell"
TELEGATE_TAG = "telegate"
PROTOCOL_LENGTH = 11

COMPUTATIONAL = "computational"
COMMUNICATION = "communication"


class CommunicationQubitError(ValueError):
    """A remote CX touches a QPU that has no communication qubits."""


@dataclass(frozen=True)
class PhysicalLayout:
    net: NetworkConfig
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        offsets, running = [], 0
        for qpu in self.net.qpus:
            offsets.append(running)
            running += qpu.total
        object.__setattr__(self, "offsets", tuple(offsets))

    @property
    def total_qubits(self) -> int:
        return self.net.total_qubits

    def comp_index(self, qpu: int, slot: int) -> int:
        if not 0 <= slot < self.net.qpus[qpu].comp_qubits:
            raise IndexError(f"QPU {qpu} has no computational slot {slot}")
        return self.offsets[qpu] + slot

    def comm_index(self, qpu: int, slot: int) -> int:
        spec = self.net.qpus[qpu]
        if not 0 <= slot < spec.comm_qubits:
            raise IndexError(f"QPU {qpu} has no communication slot {slot}")
        return self.offsets[qpu] + spec.comp_qubits + slot

    def comm_indices(self, qpu: int) -> list[int]:
        return [self.comm_index(qpu, j) for j in range(self.net.qpus[qpu].comm_qubits)]

    def qpu_of(self, index: int) -> int:
        if not 0 <= index < self.total_qubits:
            raise IndexError(f"global qubit {index} out of range")
        for qpu in reversed(range(self.net.num_qpus)):
            if index >= self.offsets[qpu]:
                return qpu
        raise AssertionError("unreachable")

    def role(self, index: int) -> str:
        qpu = self.qpu_of(index)
        local = index - self.offsets[qpu]
        return COMPUTATIONAL if local < self.net.qpus[qpu].comp_qubits else COMMUNICATION

    def computational_indices(self) -> list[int]:
        return [
            self.comp_index(qpu, slot)
            for qpu in range(self.net.num_qpus)
            for slot in range(self.net.qpus[qpu].comp_qubits)
        ]

    def communication_indices(self) -> list[int]:
        return [i for qpu in range(self.net.num_qpus) for i in self.comm_indices(qpu)]

    def logical_map(self, assignment: Assignment) -> list[int]:
        """Global index of each logical qubit."""
        return [
            self.comp_index(qpu, slot) for qpu, slot in assignment.placement
        ]


@dataclass(frozen=True)
class DistributedCircuit:
    circuit: Circuit
    layout: PhysicalLayout
    assignment: Assignment
    remote_cx_count: int
    source_clbits: int = 0

    @property
    def logical_map(self) -> list[int]:
        return self.layout.logical_map(self.assignment)

    @property
    def protocol_clbits(self) -> int:
        return 2 * self.remote_cx_count

    def validate(self) -> None:
        """Every CX other than Bell-pair creation stays inside one QPU."""
        for inst in self.circuit.instructions:
            if len(inst.qubits) < 2 or inst.tag == BELL_TAG:
                continue
            qpus = {self.layout.qpu_of(q) for q in inst.qubits}
            if len(qpus) > 1:
                raise ValueError(f"{inst.kind.name} on {inst.qubits} spans QPUs {sorted(qpus)}")

    def summary(self) -> dict[str, Any]:
        insts = self.circuit.instructions
        return {
            "total_qubits": self.layout.total_qubits,
            "remote_cx": self.remote_cx_count,
            "depth": self.circuit.depth(),
            "clbits": self.circuit.num_clbits,
            "instructions": len(insts),
            "bell_instructions": sum(1 for i in insts if i.tag == BELL_TAG),
            "telegate_instructions": sum(1 for i in insts if i.tag == TELEGATE_TAG),
        }


def remote_cx_count(distributed: DistributedCircuit) -> int:
    return distributed.remote_cx_count


def live_register(circuit: Circuit, logical_map: Sequence[int]) -> tuple[Circuit, list[int]]:
    """
    Relabel `circuit` onto the qubits that are live at some point.

    Logical qubit k moves to slot k. Every other qubit starts in |0> and is
    given a slot on first use; a Reset returns it to |0> and frees the slot
    for the next one. Since protocols are emitted contiguously, a distributed
    circuit needs at most two slots beyond its logical qubits, and
    computational slots left empty by the assignment disappear. Instruction
    order, kinds and clbits are unchanged, so fault sampling and measurement
    draws line up one to one with the original circuit.
    """
    slots = {g: k for k, g in enumerate(logical_map)}
    if len(slots) != len(logical_map):
        raise ValueError(f"logical map {list(logical_map)} repeats a qubit")
    pinned = set(slots)
    free: list[int] = []
    width = len(logical_map)
    out = []
    for inst in circuit.instructions:
        for q in inst.qubits:
            if q not in slots:
                if free:
                    slots[q] = heapq.heappop(free)
                else:
                    slots[q] = width
                    width += 1
        out.append(inst.remap(slots))
        if inst.kind is GateKind.RESET and inst.qubits[0] not in pinned:
            heapq.heappush(free, slots.pop(inst.qubits[0]))
    compact = Circuit(width, circuit.num_clbits, tuple(out))
    logger.debug(f"live_register: {circuit.num_qubits} qubits -> {width}")
    return compact, list(range(len(logical_map)))


def protocol_template(c: int, t: int, e_a: int, e_b: int, m0: int, m1: int) -> list[Instruction]:
    """
    Remote CX from control c to target t through comm qubits e_a (control
    side) and e_b (target side). Measurement results go to clbits m0 and m1.
    """
    if len({c, t, e_a, e_b}) != 4:
        raise ValueError(f"remote CX needs four distinct qubits, got {(c, t, e_a, e_b)}")
    if m0 == m1:
        raise ValueError("remote CX needs two distinct classical bits")
    bell = [h(e_a), cx(e_a, e_b)]
    telegate = [
        cx(c, e_a),
        cx(e_b, t),
        measure(e_a, m0),
        conditional_x(t, m0),
        h(e_b),
        measure(e_b, m1),
        conditional_z(c, m1),
        reset(e_a),
        reset(e_b),
    ]
    return [replace(i, tag=BELL_TAG) for i in bell] + [replace(i, tag=TELEGATE_TAG) for i in telegate]


def _acquire(tracker: DepthTracker, candidates: list[int]) -> int:
    # the comm qubit that frees up first in the layering, lowest index on ties
    return min(candidates, key=lambda q: (tracker.qubit_layer[q], q))


def distribute(circuit: Circuit, assignment: Assignment, net: NetworkConfig) -> DistributedCircuit:
    logger.debug(
        f"distribute called: {circuit.num_qubits} logical qubits, "
        f"{len(circuit)} instructions, network {net.label()}"
    )
    if assignment.num_logical != circuit.num_qubits:
        raise ValueError(
            f"assignment covers {assignment.num_logical} qubits, circuit has {circuit.num_qubits}"
        )
    if circuit.num_qubits > net.total_comp:
        raise CapacityError(
            f"{circuit.num_qubits} logical qubits do not fit in {net.total_comp} computational slots"
        )
    assignment.validate(net)

    layout = PhysicalLayout(net)
    mapping = layout.logical_map(assignment)
    tracker = DepthTracker(layout.total_qubits)
    out: list[Instruction] = []
    next_clbit = circuit.num_clbits
    remote = 0

    for inst in circuit.instructions:
        qpus = {assignment.qpu_of(q) for q in inst.qubits}
        if len(qpus) == 1:
            local = inst.remap(mapping)
            tracker.push(local)
            out.append(local)
            continue
        if inst.kind is not GateKind.CX:
            raise ValueError(f"cannot distribute a cross-QPU {inst.kind.name}; transpile first")

        control, target = inst.qubits
        qpu_a, qpu_b = assignment.qpu_of(control), assignment.qpu_of(target)
        for qpu in (qpu_a, qpu_b):
            if net.qpus[qpu].comm_qubits == 0:
                raise CommunicationQubitError(
                    f"remote CX {control}->{target} touches QPU {qpu}, which has no communication qubits"
                )
        e_a = _acquire(tracker, layout.comm_indices(qpu_a))
        e_b = _acquire(tracker, layout.comm_indices(qpu_b))
        protocol = protocol_template(
            mapping[control], mapping[target], e_a, e_b, next_clbit, next_clbit + 1
        )
        for step in protocol:
            tracker.push(step)
        out.extend(protocol)
        next_clbit += 2
        remote += 1

    distributed = DistributedCircuit(
        Circuit(layout.total_qubits, next_clbit, tuple(out)),
        layout,
        assignment,
        remote,
        circuit.num_clbits,
    )
    logger.debug(
        f"distribute successful: {layout.total_qubits} qubits, {remote} remote CX, "
        f"depth {tracker.depth}"
    )
    return distributed
