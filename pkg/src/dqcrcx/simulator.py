"""
Monte Carlo statevector trajectories under depolarizing and readout noise.

Noise model:
    - after every 1-qubit gate, with probability p1 a uniform non-identity Pauli
    - after every 2-qubit gate, with probability p2 one of the 15 non-identity
      2-qubit Paulis
    - every Measure flips its recorded bit with probability p_ro; the state
      collapses to the true outcome
    - classically conditioned gates get 1-qubit noise only when they fire
    - Reset and idle qubits are noiseless

Fidelity is the squared overlap |<ideal|psi>|^2 averaged over trajectories,
an unbiased estimate of <ideal|rho|ideal>.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .circuit import Circuit, GateKind, Instruction
from .config import EXECUTORS, get_executor, get_threads
from .distributor import DistributedCircuit, live_register

logger = logging.getLogger(__name__)

MAX_QUBITS = 26
CONVENTION = "squared-overlap"

ONE_QUBIT_GATES = frozenset({GateKind.X, GateKind.H, GateKind.RZ, GateKind.RY, GateKind.RX})
TWO_QUBIT_GATES = frozenset({GateKind.CX, GateKind.CZ})


@dataclass(frozen=True)
class NoiseParams:
    p1: float = 0.001
    p2: float = 0.005
    p_ro: float = 0.005

    def __post_init__(self):
        for name in ("p1", "p2", "p_ro"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")

    @classmethod
    def noiseless(cls) -> "NoiseParams":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def parse(cls, text: str) -> "NoiseParams":
        """Parse 'p1,p2,p_ro'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"noise must be 'p1,p2,p_ro', got {text!r}")
        return cls(*(float(p) for p in parts))

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0 and self.p_ro == 0.0

    def to_dict(self) -> dict[str, float]:
        return {"p1": self.p1, "p2": self.p2, "p_ro": self.p_ro}


@dataclass(frozen=True)
class FidelityEstimate:
    mean: float
    std_err: float
    n_trajectories: int
    convention: str = CONVENTION

    def to_csv_line(self) -> str:
        return f"{self.mean:.6f},{self.std_err:.6f},{self.n_trajectories},{self.convention}"


def _check_width(n: int) -> None:
    if n > MAX_QUBITS:
        raise ValueError(f"statevector simulation limited to {MAX_QUBITS} qubits, got {n}")


def apply_gate(state: np.ndarray, inst: Instruction, n: int) -> None:
    """Apply a unitary instruction in place. Works on batched arrays too."""
    kind, qs = inst.kind, inst.qubits
    if kind is GateKind.X:
        kernels.apply_x(state, qs[0], n)
    elif kind is GateKind.H:
        kernels.apply_h(state, qs[0], n)
    elif kind is GateKind.RZ:
        kernels.apply_rz(state, qs[0], n, inst.theta)
    elif kind is GateKind.CX:
        kernels.apply_cx(state, qs[0], qs[1], n)
    elif kind is GateKind.RY:
        kernels.apply_1q(state, qs[0], n, kernels.ry_matrix(inst.theta))
    elif kind is GateKind.RX:
        kernels.apply_1q(state, qs[0], n, kernels.rx_matrix(inst.theta))
    elif kind in (GateKind.CZ, GateKind.MCZ):
        kernels.apply_mcz(state, qs, n)
    elif kind is GateKind.CCX:
        kernels.apply_ccx(state, qs[0], qs[1], qs[2], n)
    else:
        raise ValueError(f"{kind.name} is not a unitary gate")


def simulate_ideal(circuit: Circuit) -> np.ndarray:
    if not circuit.is_unitary():
        raise ValueError("ideal simulation needs a circuit without Measure, Reset or conditionals")
    n = circuit.num_qubits
    _check_width(n)
    state = kernels.zero_state(n)
    for inst in circuit.instructions:
        apply_gate(state, inst, n)
    return state


def fault_probabilities(circuit: Circuit, noise: NoiseParams) -> np.ndarray:
    """Per-instruction fault probability: Pauli insertion for gates, bit flip for Measure."""
    probs = np.zeros(len(circuit))
    for i, inst in enumerate(circuit.instructions):
        kind = inst.kind
        if kind in ONE_QUBIT_GATES or kind.is_conditional:
            probs[i] = noise.p1
        elif kind in TWO_QUBIT_GATES:
            probs[i] = noise.p2
        elif kind is GateKind.MEASURE:
            probs[i] = noise.p_ro
        elif kind is GateKind.RESET:
            continue
        elif not noise.is_noiseless:
            raise ValueError(f"no noise model for {kind.name}; transpile first")
    return probs


def sample_faults(
    circuit: Circuit, probs: np.ndarray, rng: np.random.Generator
) -> dict[int, int]:
    """
    Draw the faults of one trajectory up front.

    Returns instruction index -> Pauli code: 1..3 for 1-qubit gates, 1..15
    for 2-qubit gates (high base-4 digit on the first qubit), 1 for a
    readout flip.
    """
    if len(probs) == 0:
        return {}
    hits = np.flatnonzero(rng.random(len(probs)) < probs)
    faults = {}
    for i in hits:
        inst = circuit.instructions[i]
        if inst.kind is GateKind.MEASURE:
            faults[int(i)] = 1
        elif len(inst.qubits) == 2:
            faults[int(i)] = int(rng.integers(1, 16))
        else:
            faults[int(i)] = int(rng.integers(1, 4))
    return faults


def _apply_fault(state: np.ndarray, inst: Instruction, n: int, code: int) -> None:
    if len(inst.qubits) == 2:
        first, second = divmod(code, 4)
        kernels.apply_pauli(state, inst.qubits[0], n, first)
        kernels.apply_pauli(state, inst.qubits[1], n, second)
    else:
        kernels.apply_pauli(state, inst.qubits[0], n, code)


def _measure(state: np.ndarray, q: int, n: int, rng: np.random.Generator) -> int:
    p_one = min(max(kernels.probability_of_one(state, q, n), 0.0), 1.0)
    outcome = int(rng.random() < p_one)
    kernels.collapse(state, q, n, outcome, p_one if outcome else 1.0 - p_one)
    return outcome


def run_trajectory(
    circuit: Circuit,
    noise: NoiseParams,
    rng: np.random.Generator,
    faults: Optional[dict[int, int]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Evolve |0...0> through one noisy trajectory.

    Returns the final state and the classical record. Faults are drawn from
    `rng` first unless given.
    """
    n = circuit.num_qubits
    _check_width(n)
    if faults is None:
        faults = sample_faults(circuit, fault_probabilities(circuit, noise), rng)

    state = kernels.zero_state(n)
    record = np.zeros(circuit.num_clbits, dtype=np.int8)
    for i, inst in enumerate(circuit.instructions):
        kind = inst.kind
        if kind is GateKind.MEASURE:
            outcome = _measure(state, inst.qubits[0], n, rng)
            record[inst.clbit] = outcome ^ (1 if i in faults else 0)
            continue
        if kind is GateKind.RESET:
            if _measure(state, inst.qubits[0], n, rng):
                kernels.apply_x(state, inst.qubits[0], n)
            continue
        if kind.is_conditional:
            if not record[inst.clbit]:
                continue
            if kind is GateKind.CONDITIONAL_X:
                kernels.apply_x(state, inst.qubits[0], n)
            else:
                kernels.apply_z(state, inst.qubits[0], n)
        else:
            apply_gate(state, inst, n)
        if i in faults:
            _apply_fault(state, inst, n, faults[i])
    return state, record


def embedded_overlap(
    state: np.ndarray, n: int, logical_map: Sequence[int], ideal: np.ndarray
) -> float:
    """
    |<ideal (x) 0_rest | state>|^2 where logical qubit k lives on global
    qubit logical_map[k] and every other qubit must be |0>.
    """
    num_logical = len(logical_map)
    tensor = kernels._tensor_view(state, n)[..., 0]
    index = [0] * n
    for g in logical_map:
        index[n - 1 - g] = slice(None)
    projected = tensor[tuple(index)]
    # remaining axes follow descending global index
    kept = sorted(logical_map, reverse=True)
    perm = [kept.index(logical_map[k]) for k in reversed(range(num_logical))]
    vector = np.transpose(projected, perm).reshape(-1)
    return float(abs(np.vdot(ideal, vector)) ** 2)


def _resolve(target: Union[Circuit, DistributedCircuit]) -> tuple[Circuit, list[int]]:
    if isinstance(target, DistributedCircuit):
        return target.circuit, target.logical_map
    return target, list(range(target.num_qubits))


def _trajectory_block(
    circuit: Circuit,
    logical_map: list[int],
    ideal: np.ndarray,
    noise: NoiseParams,
    seed: int,
    start: int,
    stop: int,
    shortcut: bool,
) -> np.ndarray:
    """Squared overlaps of trajectories start..stop-1."""
    n = circuit.num_qubits
    probs = fault_probabilities(circuit, noise)
    values = np.empty(stop - start)
    for k, t in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, t])
        faults = sample_faults(circuit, probs, rng)
        if shortcut and not faults:
            values[k] = 1.0
            continue
        state, _ = run_trajectory(circuit, noise, rng, faults)
        values[k] = embedded_overlap(state, n, logical_map, ideal)
    return values


def _blocks(n_traj: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(n_traj / (4 * workers)))
    return [(start, min(start + size, n_traj)) for start in range(0, n_traj, size)]


def trajectory_fidelities(
    target: Union[Circuit, DistributedCircuit],
    ideal: np.ndarray,
    noise: NoiseParams,
    n_traj: int,
    seed: int = 0,
    threads: Optional[int] = None,
    shortcut: bool = True,
    executor: Optional[str] = None,
) -> np.ndarray:
    """
    Per-trajectory squared overlaps; trajectory t draws from default_rng([seed, t]).

    The circuit runs on its live register (see `live_register`), so idle
    communication qubits and empty computational slots cost nothing.

    With `shortcut`, trajectories that sample no fault score 1.0 without
    evolving the state. That holds whenever the fault-free circuit
    reproduces `ideal` on every measurement branch. Noiseless runs always
    simulate every trajectory, since that branch-by-branch check is their job.
    """
    circuit, logical_map = _resolve(target)
    if ideal.shape != (1 << len(logical_map),):
        raise ValueError(
            f"ideal state has {ideal.shape[0]} amplitudes, expected 2**{len(logical_map)}"
        )
    if n_traj < 1:
        raise ValueError(f"need at least one trajectory, got {n_traj}")
    circuit, logical_map = live_register(circuit, logical_map)
    _check_width(circuit.num_qubits)
    if noise.is_noiseless:
        shortcut = False

    workers = get_threads() if threads is None else threads
    executor = get_executor() if executor is None else executor
    if executor not in EXECUTORS:
        raise ValueError(f"unknown executor {executor!r}, expected one of {list(EXECUTORS)}")
    args = (circuit, logical_map, ideal, noise, seed)
    if workers <= 1:
        return _trajectory_block(*args, 0, n_traj, shortcut)

    values = np.empty(n_traj)
    blocks = _blocks(n_traj, workers)
    pool_cls = ProcessPoolExecutor if executor == "process" else ThreadPoolExecutor
    with pool_cls(max_workers=workers) as pool:
        futures = {
            pool.submit(_trajectory_block, *args, start, stop, shortcut): (start, stop)
            for start, stop in blocks
        }
        for future, (start, stop) in futures.items():
            values[start:stop] = future.result()
    return values


def estimate_fidelity(
    target: Union[Circuit, DistributedCircuit],
    ideal: np.ndarray,
    noise: NoiseParams,
    n_traj: int,
    seed: int = 0,
    threads: Optional[int] = None,
    shortcut: bool = True,
    executor: Optional[str] = None,
) -> FidelityEstimate:
    circuit, _ = _resolve(target)
    logger.debug(
        f"estimate_fidelity called: {circuit.num_qubits} qubits, {len(circuit)} instructions, "
        f"T={n_traj}, seed={seed}"
    )
    values = trajectory_fidelities(target, ideal, noise, n_traj, seed, threads, shortcut, executor)
    mean = float(min(max(values.mean(), 0.0), 1.0))
    std_err = float(values.std(ddof=1) / math.sqrt(n_traj)) if n_traj > 1 else 0.0
    logger.debug(f"estimate_fidelity successful: {mean:.4f} +/- {std_err:.4f}")
    return FidelityEstimate(mean, std_err, n_traj)
