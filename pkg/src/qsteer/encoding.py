"""Qudits of dimension d = 2**N built from N qubits.

Bit order: for an outcome index ``j`` the qubit bits are ``(j_1, ..., j_N)``
with ``j_1`` the most significant, i.e. ``j = sum_m j_m * 2**(N - m)``.
Qubit ``m`` (1-based) is therefore the ``m``-th Kronecker factor.

Two-qudit states are stored in *qudit order*: Alice's qubits 1..N followed by
Bob's qubits 1..N, so ``|j>_A |l>_B`` sits at index ``j * d + l``. The
experiment's natural layout is *pair order* (A_1, B_1, A_2, B_2, ...);
:func:`pair_to_qudit_order` and :func:`qudit_to_pair_order` convert.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qstate import StateVector, UnitaryMatrix, tensor_all

BELL_PAIR = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))


@dataclass(frozen=True)
class QuditIndexCodec:
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")

    @classmethod
    def for_dim(cls, d: int) -> "QuditIndexCodec":
        n = int(d).bit_length() - 1
        if d < 2 or 2**n != d:
            raise ValueError(f"qubit encoding needs d to be a power of 2 >= 2, got {d}")
        return cls(n)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def check(self, j: int) -> int:
        if not 0 <= j < self.dim:
            raise ValueError(f"outcome {j} outside [0, {self.dim})")
        return int(j)

    def decode(self, j: int) -> tuple[int, ...]:
        j = self.check(j)
        n = self.n_qubits
        return tuple((j >> (n - m)) & 1 for m in range(1, n + 1))

    def encode(self, bits) -> int:
        bits = tuple(bits)
        if len(bits) != self.n_qubits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"expected {self.n_qubits} bits, got {bits}")
        return sum(b << (self.n_qubits - m) for m, b in enumerate(bits, start=1))

    def bit(self, j: int, m: int) -> int:
        """Bit ``j_m`` of outcome ``j``."""
        if not 1 <= m <= self.n_qubits:
            raise ValueError(f"qubit position {m} outside [1, {self.n_qubits}]")
        return (self.check(j) >> (self.n_qubits - m)) & 1


class Party(str, Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class BasisLabel:
    party: Party
    setting: int
    outcome: int

    def __post_init__(self):
        if self.setting not in (1, 2):
            raise ValueError(f"setting must be 1 or 2, got {self.setting}")
        if self.outcome < 0:
            raise ValueError("outcome must be non-negative")

    def validate(self, codec: QuditIndexCodec) -> "BasisLabel":
        codec.check(self.outcome)
        return self


def computational_basis_state(codec: QuditIndexCodec, j: int) -> StateVector:
    v = np.zeros(codec.dim, dtype=complex)
    v[codec.check(j)] = 1.0
    return StateVector(v)


def fourier_basis_state(codec: QuditIndexCodec, k: int) -> StateVector:
    """Fourier vector with amplitude exp(+2 pi i j k / d) / sqrt(d) on |j>."""
    k = codec.check(k)
    d = codec.dim
    j = np.arange(d)
    return StateVector(np.exp(2j * np.pi * j * k / d) / np.sqrt(d))


def fourier_matrix(d: int) -> np.ndarray:
    """Columns are the Fourier vectors for any d >= 2 (no qubit structure needed)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def fourier_qubit_factor(codec: QuditIndexCodec, m: int, k: int) -> StateVector:
    """Qubit ``m`` of the product form of Fourier vector ``k``:
    (|0> + exp(2 pi i k / 2**m)|1>) / sqrt(2)."""
    if not 1 <= m <= codec.n_qubits:
        raise ValueError(f"qubit position {m} outside [1, {codec.n_qubits}]")
    k = codec.check(k)
    return StateVector(np.array([1.0, np.exp(2j * np.pi * k / 2**m)]) / np.sqrt(2))


def basis_state(codec: QuditIndexCodec, setting: int, k: int) -> StateVector:
    if setting == 1:
        return computational_basis_state(codec, k)
    if setting == 2:
        return fourier_basis_state(codec, k)
    raise ValueError(f"setting must be 1 or 2, got {setting}")


def fourier_from_qubits(codec: QuditIndexCodec, k: int) -> StateVector:
    return tensor_all(fourier_qubit_factor(codec, m, k) for m in range(1, codec.n_qubits + 1))


def _permute_qubits(amplitudes: np.ndarray, n_total: int, order) -> np.ndarray:
    t = np.asarray(amplitudes).reshape((2,) * n_total)
    return np.transpose(t, order).reshape(-1)


def pair_to_qudit_order(state: StateVector, n_qubits: int) -> StateVector:
    """(A_1, B_1, ..., A_N, B_N) -> (A_1..A_N, B_1..B_N)."""
    order = [2 * i for i in range(n_qubits)] + [2 * i + 1 for i in range(n_qubits)]
    return StateVector(_permute_qubits(state.data, 2 * n_qubits, order))


def qudit_to_pair_order(state: StateVector, n_qubits: int) -> StateVector:
    """Inverse of :func:`pair_to_qudit_order`."""
    order = []
    for i in range(n_qubits):
        order += [i, n_qubits + i]
    return StateVector(_permute_qubits(state.data, 2 * n_qubits, order))


def entangled_source(codec: QuditIndexCodec) -> StateVector:
    """Maximally entangled pair sum_j |j>|j> / sqrt(d) in qudit order."""
    d = codec.dim
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return StateVector(v)


def bell_pairs_source(codec: QuditIndexCodec) -> StateVector:
    """The same source assembled from N Bell pairs and regrouped into qudit order."""
    pairs = tensor_all([BELL_PAIR] * codec.n_qubits)
    return pair_to_qudit_order(pairs, codec.n_qubits)


def apply_steering_unitary(state: StateVector, U: UnitaryMatrix) -> StateVector:
    """(I (x) U)|state> with ``U`` acting on Bob's qudit."""
    d = U.dim
    if state.dim != d * d:
        raise ValueError(f"state of dim {state.dim} is not a pair of {d}-level systems")
    psi = state.data.reshape(d, d) @ U.data.T
    return StateVector(psi.reshape(-1))


def supersinglet(d: int = 2) -> StateVector:
    """sum_{a+b=d-1} (-1)**a |a>|b> / sqrt(d); only d = 2 is supported."""
    if d != 2:
        raise NotImplementedError("supersinglets are only provided for d = 2")
    v = np.zeros(d * d, dtype=complex)
    for a in range(d):
        v[a * d + (d - 1 - a)] = (-1) ** a / np.sqrt(d)
    return StateVector(v)
