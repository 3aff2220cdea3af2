"""
Circuit intermediate representation.

Every stage of the pipeline (library generators, transpiler, scheduler,
distributor and simulators) passes around the same immutable `Circuit`.

Conventions:
- Qubit 0 is the least significant bit of an amplitude index.
- Classical conditions are single-bit, equality-to-1 only.
- `append`/`extend` return new circuits; existing instances never change.

Text format (one instruction per line, `#` starts a comment):

    qubits=<n> clbits=<m>
    KIND q<i> [q<j> ...] [theta=<float>] [c=<k>] [tag=<label>]
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

logger = logging.getLogger(__name__)


class GateKind(Enum):
    """Instruction kinds. X, H, RZ and CX form the basis set."""

    X = "X"
    H = "H"
    RZ = "RZ"
    CX = "CX"
    RY = "RY"
    RX = "RX"
    CZ = "CZ"
    CCX = "CCX"
    MCZ = "MCZ"
    MEASURE = "MEASURE"
    RESET = "RESET"
    CONDITIONAL_X = "CX_IF"
    CONDITIONAL_Z = "CZ_IF"

    @property
    def arity(self) -> Optional[int]:
        """Fixed qubit count, or None for MCZ (k controls + 1)."""
        return _ARITY[self]

    @property
    def is_rotation(self) -> bool:
        return self in ROTATIONS

    @property
    def is_conditional(self) -> bool:
        return self in CONDITIONALS


_ARITY = {
    GateKind.X: 1,
    GateKind.H: 1,
    GateKind.RZ: 1,
    GateKind.RY: 1,
    GateKind.RX: 1,
    GateKind.MEASURE: 1,
    GateKind.RESET: 1,
    GateKind.CONDITIONAL_X: 1,
    GateKind.CONDITIONAL_Z: 1,
    GateKind.CX: 2,
    GateKind.CZ: 2,
    GateKind.CCX: 3,
    GateKind.MCZ: None,
}

BASIS = frozenset({GateKind.X, GateKind.H, GateKind.RZ, GateKind.CX})
ROTATIONS = frozenset({GateKind.RZ, GateKind.RY, GateKind.RX})
CONDITIONALS = frozenset({GateKind.CONDITIONAL_X, GateKind.CONDITIONAL_Z})
NON_UNITARY = frozenset({GateKind.MEASURE, GateKind.RESET}) | CONDITIONALS


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    qubits: tuple[int, ...]
    theta: Optional[float] = None
    clbit: Optional[int] = None
    tag: Optional[str] = None

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)

        arity = self.kind.arity
        if arity is None:
            if len(qubits) < 1:
                raise ValueError("MCZ needs at least one qubit")
        elif len(qubits) != arity:
            raise ValueError(
                f"{self.kind.name} acts on {arity} qubit(s), got {len(qubits)}"
            )
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind.name} has repeated qubits {qubits}")
        if any(q < 0 for q in qubits):
            raise IndexError(f"negative qubit index in {qubits}")

        if self.kind.is_rotation:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{self.kind.name} needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{self.kind.name} takes no angle")

        needs_clbit = self.kind is GateKind.MEASURE or self.kind.is_conditional
        if needs_clbit and self.clbit is None:
            raise ValueError(f"{self.kind.name} needs a classical bit")
        if not needs_clbit and self.clbit is not None:
            raise ValueError(f"{self.kind.name} takes no classical bit")
        if self.clbit is not None and self.clbit < 0:
            raise IndexError(f"negative classical bit {self.clbit}")

    @property
    def num_controls(self) -> int:
        if self.kind is GateKind.MCZ:
            return len(self.qubits) - 1
        return {GateKind.CX: 1, GateKind.CZ: 1, GateKind.CCX: 2}.get(self.kind, 0)

    def remap(self, mapping, clbit_offset: int = 0) -> "Instruction":
        """Return a copy with qubits sent through `mapping` and clbits shifted."""
        clbit = None if self.clbit is None else self.clbit + clbit_offset
        return Instruction(
            self.kind,
            tuple(mapping[q] for q in self.qubits),
            self.theta,
            clbit,
            self.tag,
        )


# Shorthand constructors used by the generators, transpiler and distributor.
def x(q: int) -> Instruction:
    return Instruction(GateKind.X, (q,))


def h(q: int) -> Instruction:
    return Instruction(GateKind.H, (q,))


def rz(q: int, theta: float) -> Instruction:
    return Instruction(GateKind.RZ, (q,), theta)


def ry(q: int, theta: float) -> Instruction:
    return Instruction(GateKind.RY, (q,), theta)


def rx(q: int, theta: float) -> Instruction:
    return Instruction(GateKind.RX, (q,), theta)


def cx(control: int, target: int) -> Instruction:
    return Instruction(GateKind.CX, (control, target))


def cz(a: int, b: int) -> Instruction:
    return Instruction(GateKind.CZ, (a, b))


def ccx(c0: int, c1: int, target: int) -> Instruction:
    return Instruction(GateKind.CCX, (c0, c1, target))


def mcz(*qubits: int) -> Instruction:
    return Instruction(GateKind.MCZ, tuple(qubits))


def measure(q: int, clbit: int) -> Instruction:
    return Instruction(GateKind.MEASURE, (q,), clbit=clbit)


def reset(q: int) -> Instruction:
    return Instruction(GateKind.RESET, (q,))


def conditional_x(q: int, clbit: int) -> Instruction:
    return Instruction(GateKind.CONDITIONAL_X, (q,), clbit=clbit)


def conditional_z(q: int, clbit: int) -> Instruction:
    return Instruction(GateKind.CONDITIONAL_Z, (q,), clbit=clbit)


class DepthTracker:
    """
    Incremental list scheduler.

    Instructions conflict when they share a qubit, or share a classical bit
    with at least one of them writing it. Each pushed instruction lands one
    layer after the latest conflicting predecessor.
    """

    def __init__(self, num_qubits: int):
        self.qubit_layer = [0] * num_qubits
        self._clbit_written: dict[int, int] = {}
        self._clbit_read: dict[int, int] = {}
        self.depth = 0

    def ready_layer(self, inst: Instruction) -> int:
        """Layer index after which `inst` may start."""
        ready = max((self.qubit_layer[q] for q in inst.qubits), default=0)
        if inst.clbit is not None:
            ready = max(ready, self._clbit_written.get(inst.clbit, 0))
            if inst.kind is GateKind.MEASURE:
                ready = max(ready, self._clbit_read.get(inst.clbit, 0))
        return ready

    def push(self, inst: Instruction) -> int:
        layer = self.ready_layer(inst) + 1
        for q in inst.qubits:
            self.qubit_layer[q] = layer
        if inst.clbit is not None:
            if inst.kind is GateKind.MEASURE:
                self._clbit_written[inst.clbit] = layer
            else:
                self._clbit_read[inst.clbit] = max(
                    self._clbit_read.get(inst.clbit, 0), layer
                )
        self.depth = max(self.depth, layer)
        return layer


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    instructions: tuple[Instruction, ...] = ()
    # clbits written by some Measure; None until the instruction list is checked
    _written: Optional[frozenset] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise ValueError("circuit sizes must be non-negative")
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self._written is None:
            written: set[int] = set()
            for inst in self.instructions:
                self._check(inst, written)
                if inst.kind is GateKind.MEASURE:
                    written.add(inst.clbit)
            object.__setattr__(self, "_written", frozenset(written))

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def _check(self, inst: Instruction, written) -> None:
        for q in inst.qubits:
            if q >= self.num_qubits:
                raise IndexError(
                    f"qubit {q} out of range for {self.num_qubits}-qubit circuit"
                )
        if inst.clbit is not None:
            if inst.clbit >= self.num_clbits:
                raise IndexError(
                    f"classical bit {inst.clbit} out of range ({self.num_clbits} clbits)"
                )
            if inst.kind.is_conditional and inst.clbit not in written:
                raise ValueError(
                    f"{inst.kind.name} reads classical bit {inst.clbit} before any Measure wrote it"
                )

    def append(self, inst: Instruction) -> "Circuit":
        return self.extend((inst,))

    def extend(self, insts: Iterable[Instruction]) -> "Circuit":
        written = set(self._written)
        added = []
        for inst in insts:
            self._check(inst, written)
            if inst.kind is GateKind.MEASURE:
                written.add(inst.clbit)
            added.append(inst)
        return Circuit(
            self.num_qubits,
            self.num_clbits,
            self.instructions + tuple(added),
            frozenset(written),
        )

    def depth(self) -> int:
        tracker = DepthTracker(self.num_qubits)
        for inst in self.instructions:
            tracker.push(inst)
        return tracker.depth

    def count_gates(self, kind_filter: Iterable[GateKind]) -> int:
        kinds = frozenset(kind_filter)
        return sum(1 for inst in self.instructions if inst.kind in kinds)

    def gate_histogram(self) -> dict[str, int]:
        histogram: dict[str, int] = {}
        for inst in self.instructions:
            histogram[inst.kind.name] = histogram.get(inst.kind.name, 0) + 1
        return dict(sorted(histogram.items()))

    def kinds(self) -> frozenset:
        return frozenset(inst.kind for inst in self.instructions)

    def is_unitary(self) -> bool:
        return not (self.kinds() & NON_UNITARY)


def append(circuit: Circuit, inst: Instruction) -> Circuit:
    return circuit.append(inst)


def depth(circuit: Circuit) -> int:
    return circuit.depth()


def count_gates(circuit: Circuit, kind_filter: Iterable[GateKind]) -> int:
    return circuit.count_gates(kind_filter)


def dumps(circuit: Circuit) -> str:
    lines = [f"qubits={circuit.num_qubits} clbits={circuit.num_clbits}"]
    for inst in circuit.instructions:
        parts = [inst.kind.value] + [f"q{q}" for q in inst.qubits]
        if inst.theta is not None:
            parts.append(f"theta={inst.theta!r}")
        if inst.clbit is not None:
            parts.append(f"c={inst.clbit}")
        if inst.tag:
            parts.append(f"tag={inst.tag}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> tuple[int, int]:
    fields = dict(part.split("=", 1) for part in line.split())
    try:
        return int(fields["qubits"]), int(fields.get("clbits", 0))
    except (KeyError, ValueError) as e:
        raise ValueError(f"malformed circuit header {line!r}") from e


def _parse_instruction(line: str, lineno: int) -> Instruction:
    tokens = line.split()
    try:
        kind = GateKind(tokens[0].upper())
    except ValueError as e:
        raise ValueError(f"line {lineno}: unknown instruction kind {tokens[0]!r}") from e

    qubits, theta, clbit, tag = [], None, None, None
    for token in tokens[1:]:
        if token.startswith("q") and token[1:].isdigit():
            qubits.append(int(token[1:]))
        elif token.startswith("theta="):
            theta = float(token[len("theta="):])
        elif token.startswith("c="):
            clbit = int(token[len("c="):])
        elif token.startswith("tag="):
            tag = token[len("tag="):]
        else:
            raise ValueError(f"line {lineno}: unexpected token {token!r}")
    return Instruction(kind, tuple(qubits), theta, clbit, tag)


def loads(text: str) -> Circuit:
    header = None
    insts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = _parse_header(line)
            continue
        insts.append(_parse_instruction(line, lineno))
    if header is None:
        raise ValueError("circuit text has no header line")
    return Circuit(*header).extend(insts)


def read_circuit(path: str | Path) -> Circuit:
    path = Path(path)
    logger.info(f"Reading circuit from {path}")
    return loads(path.read_text())


def write_circuit(circuit: Circuit, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(circuit))
    logger.info(
        f"Wrote {len(circuit)} instructions on {circuit.num_qubits} qubits to {path}"
    )
