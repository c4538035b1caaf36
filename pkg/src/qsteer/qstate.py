"""Small dense complex linear algebra for quantum states.

Three thin wrappers around ``numpy`` arrays (:class:`StateVector`,
:class:`DensityMatrix`, :class:`UnitaryMatrix`) validate their invariants on
construction and are read-only afterwards. Everything in scope is at most a
few hundred dimensions, so plain dense ``numpy.linalg`` is used throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state."""

    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 1 or data.size == 0:
            raise ValueError("state vector must be a non-empty 1-d array")
        norm = np.vdot(data, data).real
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state vector not normalized (norm^2={norm:.12g})")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex)
        return cls(v / np.linalg.norm(v))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.data, self.data.conj()))

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] == 0:
            raise ValueError("density matrix must be square and non-empty")
        if not np.allclose(data, data.conj().T, atol=ATOL, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(data).real
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
        if np.linalg.eigvalsh(data).min() < -ATOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] == 0:
            raise ValueError("unitary must be square and non-empty")
        if not np.allclose(data @ data.conj().T, np.eye(data.shape[0]), atol=ATOL, rtol=0):
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def H(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.data.conj().T)

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(self.data @ other.data)
        if isinstance(other, StateVector):
            return StateVector(self.data @ other.data)
        return NotImplemented

    @classmethod
    def identity(cls, dim: int) -> "UnitaryMatrix":
        return cls(np.eye(dim))

    def __repr__(self):
        return f"UnitaryMatrix(dim={self.dim})"


def _as_array(x) -> np.ndarray:
    return x.data if isinstance(x, (StateVector, DensityMatrix, UnitaryMatrix)) else np.asarray(x, dtype=complex)


def tensor(a, b):
    """Kronecker product with ``a`` as the most significant factor.

    Both operands must be the same kind (state, density matrix or unitary).
    """
    if type(a) is not type(b) or not isinstance(a, (StateVector, DensityMatrix, UnitaryMatrix)):
        raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    return type(a)(np.kron(a.data, b.data))


def tensor_all(factors):
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def is_projector(P, atol: float = ATOL) -> bool:
    P = _as_array(P)
    return np.allclose(P @ P, P, atol=atol, rtol=0) and np.allclose(P, P.conj().T, atol=atol, rtol=0)


def expectation(P, rho: DensityMatrix) -> float:
    """Probability Tr[P rho] of the projector ``P`` on ``rho``."""
    P = _as_array(P)
    if P.shape != rho.data.shape:
        raise ValueError(f"dimension mismatch: projector {P.shape} vs state {rho.data.shape}")
    if not is_projector(P):
        raise ValueError("operator is not a projector")
    p = float(np.einsum("ij,ji->", P, rho.data).real)
    if -ATOL < p < 0.0:
        return 0.0
    if 1.0 < p < 1.0 + ATOL:
        return 1.0
    return p


def max_eigenvalue(H) -> float:
    H = _as_array(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(H, H.conj().T, atol=ATOL, rtol=0):
        raise ValueError("matrix is not Hermitian")
    return float(np.linalg.eigvalsh(H)[-1])


def fidelity_pure(rho: DensityMatrix, psi: StateVector) -> float:
    """Overlap <psi|rho|psi> of a mixed state with a pure target."""
    if rho.dim != psi.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {psi.dim}")
    f = float(np.vdot(psi.data, rho.data @ psi.data).real)
    return min(max(f, 0.0), 1.0)


def overlap(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the phase-insensitive way to compare pure states."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.data, b.data)) ** 2)


def equal_up_to_phase(a: StateVector, b: StateVector, atol: float = ATOL) -> bool:
    return overlap(a, b) >= 1.0 - atol


def phase_aligned_distance(A, B) -> float:
    """Max-entry distance between two arrays after removing the best global phase."""
    A, B = _as_array(A), _as_array(B)
    inner = np.vdot(B, A)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.max(np.abs(A - phase * B)))


def partial_trace(rho, dims, keep):
    """Reduced density matrix over the subsystems listed in ``keep``."""
    rho = _as_array(rho)
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for offset, i in enumerate(traced):
        ax = i - offset
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return UnitaryMatrix(q)


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.normalized(z)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)
