"""
Exact density-matrix evolution, used as an oracle for the trajectory
simulator on circuits of at most 10 qubits.

Mid-circuit measurements are deferred: Measure(e -> m) dephases e and applies
the readout flip to e itself, and every conditional reading m becomes a
gate controlled by e. This is exact as long as e is left alone between its
measurement and its reset, which is checked.
"""

import logging
from typing import Sequence, Union

import numpy as np

from .circuit import Circuit, GateKind, Instruction
from .distributor import DistributedCircuit, live_register
from .simulator import (
    ONE_QUBIT_GATES,
    TWO_QUBIT_GATES,
    NoiseParams,
    apply_gate,
)

logger = logging.getLogger(__name__)

MAX_QUBITS = 10


def _blocks(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    """View with axes 1 and 4 selecting the row and column bit of qubit q."""
    outer, inner = 1 << (n - q - 1), 1 << q
    return rho.reshape(outer, 2, inner, outer, 2, inner)


def _conjugate(rho: np.ndarray, inst: Instruction, n: int) -> np.ndarray:
    apply_gate(rho, inst, n)
    rho = np.ascontiguousarray(rho.conj().T)
    apply_gate(rho, inst, n)
    return rho


def _replace_with_mixed(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    """I/2 on qubit q tensored with the partial trace over q."""
    v = _blocks(rho, q, n)
    reduced = 0.5 * (v[:, 0, :, :, 0, :] + v[:, 1, :, :, 1, :])
    out = np.zeros_like(v)
    out[:, 0, :, :, 0, :] = reduced
    out[:, 1, :, :, 1, :] = reduced
    return out.reshape(rho.shape)


def depolarize(rho: np.ndarray, qubits: Sequence[int], n: int, p: float) -> np.ndarray:
    """
    (1 - p) rho + p/(4**k - 1) * sum of non-identity Pauli conjugations,
    written as a mix of rho and the fully depolarized marginal.
    """
    if p == 0.0:
        return rho
    k = len(qubits)
    weight = 4**k * p / (4**k - 1)
    mixed = rho
    for q in qubits:
        mixed = _replace_with_mixed(mixed, q, n)
    return (1.0 - weight) * rho + weight * mixed


def _dephase(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    v = _blocks(rho, q, n).copy()
    v[:, 0, :, :, 1, :] = 0
    v[:, 1, :, :, 0, :] = 0
    return v.reshape(rho.shape)


def _bit_flip(rho: np.ndarray, q: int, n: int, p: float) -> np.ndarray:
    if p == 0.0:
        return rho
    flipped = _conjugate(rho.copy(), Instruction(GateKind.X, (q,)), n)
    return (1.0 - p) * rho + p * flipped


def _reset(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    v = _blocks(rho, q, n)
    out = np.zeros_like(v)
    out[:, 0, :, :, 0, :] = v[:, 0, :, :, 0, :] + v[:, 1, :, :, 1, :]
    return out.reshape(rho.shape)


def _conditional(rho: np.ndarray, inst: Instruction, source: int, n: int, p1: float) -> np.ndarray:
    target = inst.qubits[0]
    if inst.kind is GateKind.CONDITIONAL_X:
        gate = Instruction(GateKind.CX, (source, target))
    else:
        gate = Instruction(GateKind.CZ, (source, target))
    rho = _conjugate(rho, gate, n)
    if p1 == 0.0:
        return rho
    # noise only on the branch where the correction fired
    noisy = _blocks(depolarize(rho, (target,), n, p1), source, n)
    v = _blocks(rho, source, n).copy()
    v[:, 1, :, :, 1, :] = noisy[:, 1, :, :, 1, :]
    return v.reshape(rho.shape)


def evolve_density(circuit: Circuit, noise: NoiseParams) -> np.ndarray:
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"density-matrix oracle limited to {MAX_QUBITS} qubits, got {n}")

    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    source: dict[int, int] = {}
    live: set[int] = set()

    for inst in circuit.instructions:
        kind = inst.kind
        if kind.is_conditional:
            if inst.clbit not in source:
                raise ValueError(f"classical bit {inst.clbit} has no live measured qubit")
            if inst.qubits[0] in live:
                raise ValueError(f"conditional targets measured qubit {inst.qubits[0]}")
            rho = _conditional(rho, inst, source[inst.clbit], n, noise.p1)
            continue
        if kind is GateKind.RESET:
            q = inst.qubits[0]
            rho = _reset(rho, q, n)
            live.discard(q)
            source = {m: e for m, e in source.items() if e != q}
            continue

        touched = live.intersection(inst.qubits)
        if touched:
            raise ValueError(
                f"{kind.name} touches qubit {sorted(touched)} between its measurement and reset"
            )
        if kind is GateKind.MEASURE:
            q = inst.qubits[0]
            rho = _bit_flip(_dephase(rho, q, n), q, n, noise.p_ro)
            source[inst.clbit] = q
            live.add(q)
            continue

        rho = _conjugate(rho, inst, n)
        if kind in ONE_QUBIT_GATES:
            rho = depolarize(rho, inst.qubits, n, noise.p1)
        elif kind in TWO_QUBIT_GATES:
            rho = depolarize(rho, inst.qubits, n, noise.p2)
        elif not noise.is_noiseless:
            raise ValueError(f"no noise model for {kind.name}; transpile first")
    return rho


def embed_state(ideal: np.ndarray, logical_map: Sequence[int], n: int) -> np.ndarray:
    """Place logical qubit k on global qubit logical_map[k], everything else |0>."""
    basis = np.arange(ideal.shape[0])
    index = np.zeros_like(basis)
    for k, g in enumerate(logical_map):
        index |= ((basis >> k) & 1) << g
    full = np.zeros(1 << n, dtype=complex)
    full[index] = ideal
    return full


def exact_density_fidelity(
    target: Union[Circuit, DistributedCircuit], ideal: np.ndarray, noise: NoiseParams
) -> float:
    """
    <ideal (x) 0_comm| rho |ideal (x) 0_comm> for the exactly evolved circuit.

    The circuit runs on its live register, so the width limit applies to the
    logical qubits plus the communication qubits in use at once.
    """
    if isinstance(target, DistributedCircuit):
        circuit, logical_map = target.circuit, target.logical_map
    else:
        circuit, logical_map = target, list(range(target.num_qubits))
    if ideal.shape != (1 << len(logical_map),):
        raise ValueError(
            f"ideal state has {ideal.shape[0]} amplitudes, expected 2**{len(logical_map)}"
        )
    circuit, logical_map = live_register(circuit, logical_map)
    logger.debug(f"exact_density_fidelity called: {circuit.num_qubits} live qubits")
    rho = evolve_density(circuit, noise)
    phi = embed_state(ideal, logical_map, circuit.num_qubits)
    return float(np.vdot(phi, rho @ phi).real)
