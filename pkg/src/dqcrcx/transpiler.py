"""
Rewrite circuits into the {X, RZ, H, CX} basis.

Every rule is exact up to global phase; no gate fusion or cancellation is
performed, so gate counts are a deterministic function of the input.

Rules:
    RX(t)            -> H, RZ(t), H
    RY(t)            -> RZ(-pi/2), H, RZ(t), H, RZ(pi/2)
    CZ(a, b)         -> H(b), CX(a, b), H(b)
    CCX(a, b, c)     -> 15-gate Toffoli network (6 CX, T = RZ(pi/4))
    MCZ(q)           -> RZ(pi)
    MCZ(a, b)        -> as CZ
    MCZ(q0..qk), k>1 -> Gray-code phase polynomial, 2**(k+1) - 2 CX, no ancilla
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circuit import (
    BASIS,
    NON_UNITARY,
    Circuit,
    GateKind,
    Instruction,
    cx,
    h,
    rz,
)
from .simulator import apply_gate

logger = logging.getLogger(__name__)

OUTPUT_KINDS = BASIS | NON_UNITARY
VERIFY_MAX_QUBITS = 6
PHASE_GRID = 360


def _rx(q: int, theta: float) -> list[Instruction]:
    return [h(q), rz(q, theta), h(q)]


def _ry(q: int, theta: float) -> list[Instruction]:
    return [rz(q, -math.pi / 2), h(q), rz(q, theta), h(q), rz(q, math.pi / 2)]


def _cz(a: int, b: int) -> list[Instruction]:
    return [h(b), cx(a, b), h(b)]


def _toffoli(a: int, b: int, c: int) -> list[Instruction]:
    t, tdg = math.pi / 4, -math.pi / 4
    return [
        h(c),
        cx(b, c),
        rz(c, tdg),
        cx(a, c),
        rz(c, t),
        cx(b, c),
        rz(c, tdg),
        cx(a, c),
        rz(b, t),
        rz(c, t),
        h(c),
        cx(a, b),
        rz(a, t),
        rz(b, tdg),
        cx(a, b),
    ]


def _phase_polynomial(qubits: tuple[int, ...], lam: float) -> list[Instruction]:
    """
    Phase lam on the all-ones state of `qubits`, up to global phase.

    Uses prod(x) = 2**(1-m) * sum over nonempty S of (-1)**(|S|+1) * parity(S).
    Parities that include the last qubit are visited in Gray-code order with
    one CX per step; the remaining terms equal a phase lam/2 on the all-ones
    state of the other qubits, handled recursively.
    """
    m = len(qubits)
    if m == 1:
        return [rz(qubits[0], lam)]

    target, controls = qubits[-1], qubits[:-1]
    k = m - 1
    unit = lam / 2 ** (m - 1)
    insts = [rz(target, unit)]
    previous = 0
    for i in range(1, 2**k):
        gray = i ^ (i >> 1)
        changed = (gray ^ previous).bit_length() - 1
        insts.append(cx(controls[changed], target))
        sign = 1 if bin(gray).count("1") % 2 == 0 else -1
        insts.append(rz(target, sign * unit))
        previous = gray
    # the last Gray code has only the top bit set
    insts.append(cx(controls[k - 1], target))
    return insts + _phase_polynomial(controls, lam / 2)


def _mcz(qubits: tuple[int, ...]) -> list[Instruction]:
    if len(qubits) == 1:
        return [rz(qubits[0], math.pi)]
    if len(qubits) == 2:
        return _cz(*qubits)
    return _phase_polynomial(qubits, math.pi)


def decompose(inst: Instruction) -> list[Instruction]:
    """Basis rewrite of a single instruction."""
    kind = inst.kind
    if kind in OUTPUT_KINDS:
        return [inst]
    if kind is GateKind.RX:
        return _rx(inst.qubits[0], inst.theta)
    if kind is GateKind.RY:
        return _ry(inst.qubits[0], inst.theta)
    if kind is GateKind.CZ:
        return _cz(*inst.qubits)
    if kind is GateKind.CCX:
        return _toffoli(*inst.qubits)
    if kind is GateKind.MCZ:
        return _mcz(inst.qubits)
    raise ValueError(f"no basis rule for {kind.name}")


def transpile(circuit: Circuit) -> Circuit:
    out = []
    for inst in circuit.instructions:
        out.extend(decompose(inst))
    return Circuit(circuit.num_qubits, circuit.num_clbits, tuple(out))


def unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary, built by applying each gate to the identity."""
    if not circuit.is_unitary():
        raise ValueError("cannot build a unitary for a circuit with measurements or conditionals")
    n = circuit.num_qubits
    if n > VERIFY_MAX_QUBITS:
        raise ValueError(f"dense unitaries limited to {VERIFY_MAX_QUBITS} qubits, got {n}")
    matrix = np.eye(1 << n, dtype=complex)
    for inst in circuit.instructions:
        apply_gate(matrix, inst, n)
    return matrix


def _max_deviation(ua: np.ndarray, ub: np.ndarray, phase: float) -> float:
    return float(np.max(np.abs(ua - np.exp(1j * phase) * ub)))


def verify_unitary(a: Circuit, b: Circuit) -> float:
    """
    min over phi of the max entrywise |U_a - e^{i phi} U_b|.

    The phase that minimizes the Frobenius distance is exact for equivalent
    circuits. Otherwise the envelope is scanned on a grid and the best grid
    point is polished by golden-section search inside its bracket.
    """
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"width mismatch: {a.num_qubits} vs {b.num_qubits}")
    ua, ub = unitary(a).ravel(), unitary(b).ravel()
    overlap = np.vdot(ub, ua)
    aligned = float(np.angle(overlap)) if abs(overlap) > 1e-12 else 0.0
    best_phase, best = aligned, _max_deviation(ua, ub, aligned)
    if best < 1e-9:
        return best

    grid = np.linspace(0.0, 2 * math.pi, PHASE_GRID, endpoint=False)
    envelope = np.abs(ua[None, :] - np.exp(1j * grid)[:, None] * ub[None, :]).max(axis=1)
    k = int(np.argmin(envelope))
    if envelope[k] < best:
        best_phase, best = float(grid[k]), float(envelope[k])

    step = 2 * math.pi / PHASE_GRID
    lo, hi = best_phase - step, best_phase + step
    ratio = (math.sqrt(5) - 1) / 2
    for _ in range(60):
        m1, m2 = hi - ratio * (hi - lo), lo + ratio * (hi - lo)
        if _max_deviation(ua, ub, m1) <= _max_deviation(ua, ub, m2):
            hi = m2
        else:
            lo = m1
    return min(best, _max_deviation(ua, ub, (lo + hi) / 2))


@dataclass
class BasisReport:
    input_histogram: dict[str, int]
    output_histogram: dict[str, int]
    verified: bool = False
    max_deviation: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    def to_lines(self) -> list[str]:
        lines = [f"input.{k}={v}" for k, v in self.input_histogram.items()]
        lines += [f"output.{k}={v}" for k, v in self.output_histogram.items()]
        lines.append(f"verified={str(self.verified).lower()}")
        if self.max_deviation is not None:
            lines.append(f"max_deviation={self.max_deviation:.3e}")
        return lines


def transpile_with_report(circuit: Circuit, verify: bool = True) -> tuple[Circuit, BasisReport]:
    out = transpile(circuit)
    report = BasisReport(circuit.gate_histogram(), out.gate_histogram())

    stray = out.kinds() - OUTPUT_KINDS
    if stray:
        raise ValueError(f"transpiled circuit still contains {sorted(k.name for k in stray)}")

    if verify and circuit.is_unitary() and circuit.num_qubits <= VERIFY_MAX_QUBITS:
        report.max_deviation = verify_unitary(circuit, out)
        report.verified = True
        if report.max_deviation > 1e-10:
            logger.warning(
                f"Transpiled unitary deviates by {report.max_deviation:.3e} from the input"
            )
    elif verify:
        report.notes.append("unitary check skipped (non-unitary or too wide)")

    logger.info(
        f"Transpiled {len(circuit)} -> {len(out)} instructions, "
        f"CX {circuit.count_gates({GateKind.CX})} -> {out.count_gates({GateKind.CX})}"
    )
    return out, report
