"""
In-place amplitude kernels.

All kernels take a C-contiguous array whose leading axis has length 2**n and
is indexed by the computational basis (qubit q <-> bit q of the index). Any
trailing axis is treated as a batch, so the same kernels evolve a state
vector (shape (2**n,)), build a unitary column by column (shape
(2**n, 2**n)) or act on the row index of a density matrix.
"""

import math

import numpy as np

SQRT1_2 = 1 / math.sqrt(2)

PAULI = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2


def rz_matrix(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _pair_view(state: np.ndarray, q: int, n: int) -> np.ndarray:
    """View with axis 1 selecting bit q: shape (2**(n-q-1), 2, 2**q, batch)."""
    return state.reshape(1 << (n - q - 1), 2, 1 << q, -1)


def _tensor_view(state: np.ndarray, n: int) -> np.ndarray:
    return state.reshape((2,) * n + (-1,))


def _index(n: int, fixed: dict[int, int]) -> tuple:
    """Basic index into a tensor view fixing qubit -> bit value."""
    index = [slice(None)] * (n + 1)
    for q, bit in fixed.items():
        index[n - 1 - q] = bit
    return tuple(index)


def apply_x(state: np.ndarray, q: int, n: int) -> None:
    v = _pair_view(state, q, n)
    low = v[:, 0].copy()
    v[:, 0] = v[:, 1]
    v[:, 1] = low


def apply_z(state: np.ndarray, q: int, n: int) -> None:
    _pair_view(state, q, n)[:, 1] *= -1


def apply_y(state: np.ndarray, q: int, n: int) -> None:
    v = _pair_view(state, q, n)
    low = v[:, 0].copy()
    v[:, 0] = -1j * v[:, 1]
    v[:, 1] = 1j * low


def apply_h(state: np.ndarray, q: int, n: int) -> None:
    v = _pair_view(state, q, n)
    low = v[:, 0].copy()
    v[:, 0] += v[:, 1]
    v[:, 0] *= SQRT1_2
    v[:, 1] = (low - v[:, 1]) * SQRT1_2


def apply_rz(state: np.ndarray, q: int, n: int, theta: float) -> None:
    v = _pair_view(state, q, n)
    v[:, 0] *= np.exp(-0.5j * theta)
    v[:, 1] *= np.exp(0.5j * theta)


def apply_1q(state: np.ndarray, q: int, n: int, matrix: np.ndarray) -> None:
    v = _pair_view(state, q, n)
    low = v[:, 0].copy()
    high = v[:, 1].copy()
    v[:, 0] = matrix[0, 0] * low + matrix[0, 1] * high
    v[:, 1] = matrix[1, 0] * low + matrix[1, 1] * high


def apply_cx(state: np.ndarray, control: int, target: int, n: int) -> None:
    t = _tensor_view(state, n)
    off = _index(n, {control: 1, target: 0})
    on = _index(n, {control: 1, target: 1})
    low = t[off].copy()
    t[off] = t[on]
    t[on] = low


def apply_mcz(state: np.ndarray, qubits: tuple[int, ...], n: int) -> None:
    """Phase -1 on the all-ones subspace of `qubits` (CZ, CCZ, ...)."""
    _tensor_view(state, n)[_index(n, {q: 1 for q in qubits})] *= -1


def apply_ccx(state: np.ndarray, c0: int, c1: int, target: int, n: int) -> None:
    t = _tensor_view(state, n)
    off = _index(n, {c0: 1, c1: 1, target: 0})
    on = _index(n, {c0: 1, c1: 1, target: 1})
    low = t[off].copy()
    t[off] = t[on]
    t[on] = low


def apply_pauli(state: np.ndarray, q: int, n: int, code: int) -> None:
    """code 1, 2, 3 = X, Y, Z; 0 is the identity."""
    if code == 1:
        apply_x(state, q, n)
    elif code == 2:
        apply_y(state, q, n)
    elif code == 3:
        apply_z(state, q, n)


def probability_of_one(state: np.ndarray, q: int, n: int) -> float:
    high = _pair_view(state, q, n)[:, 1]
    return float(np.vdot(high, high).real)


def collapse(state: np.ndarray, q: int, n: int, outcome: int, probability: float) -> None:
    """Project qubit q onto `outcome` and renormalize (state vectors only)."""
    v = _pair_view(state, q, n)
    v[:, 1 - outcome] = 0
    v[:, outcome] /= math.sqrt(probability)


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    return state
