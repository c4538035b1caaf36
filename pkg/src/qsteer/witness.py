"""Steering witness kernels for the EPR and single-system protocols.

Joint tables are built qubit by qubit: a qudit outcome ``k`` maps to one
projector per qubit, and each cell of the ``d x d`` table is a product of
per-qubit (or per-pair) probabilities.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .channels import IDENTITY, Channel, restricted_preparation
from .encoding import BELL_PAIR, QuditIndexCodec
from .optics import projector_array
from .qstate import ATOL, DensityMatrix

KINDS = ("epr", "ss")


@dataclass(frozen=True, eq=False)
class JointProbabilityTable:
    setting: int
    entries: np.ndarray

    def __post_init__(self):
        if self.setting not in (1, 2):
            raise ValueError(f"setting must be 1 or 2, got {self.setting}")
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("joint table must be square")
        if e.min() < -ATOL or e.max() > 1 + ATOL:
            raise ValueError("joint probabilities must lie in [0, 1]")
        if abs(e.sum() - 1.0) > ATOL:
            raise ValueError(f"joint table sums to {e.sum():.12g}, expected 1")
        e = np.clip(e, 0.0, 1.0)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def alice_marginal(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def conditional(self) -> np.ndarray:
        """P(b | a); rows with P(a) = 0 are left at zero."""
        pa = self.alice_marginal()
        out = np.zeros_like(self.entries)
        nz = pa > 0
        out[nz] = self.entries[nz] / pa[nz, None]
        return out


@lru_cache(maxsize=None)
def _ideal_projectors(n: int, setting: int) -> np.ndarray:
    codec = QuditIndexCodec(n)
    out = np.empty((n, codec.dim, 2, 2), dtype=complex)
    for m in range(1, n + 1):
        for k in range(codec.dim):
            outcome = codec.bit(k, m) if setting == 1 else k
            out[m - 1, k] = projector_array(setting, m, outcome)
    out.setflags(write=False)
    return out


def projector_stack(n: int, setting: int, offsets=None, frame=None) -> np.ndarray:
    """Per-qubit projectors for every qudit outcome, shape ``(n, 2**n, 2, 2)``.

    ``offsets[m-1][r]`` perturbs the HWP angle used for qubit ``m`` and plate
    residue ``r`` (setting 2 only). ``frame[m-1]`` is a 2x2 unitary ``u`` that
    rotates the measurement basis: each projector P becomes u P u^dag.
    """
    if setting not in (1, 2):
        raise ValueError(f"setting must be 1 or 2, got {setting}")
    if offsets is None or setting == 1:
        P = _ideal_projectors(n, setting)
    else:
        d = 2**n
        P = np.empty((n, d, 2, 2), dtype=complex)
        for m in range(1, n + 1):
            off = np.asarray(offsets[m - 1], dtype=float)
            for k in range(d):
                P[m - 1, k] = projector_array(2, m, k, off[k % 2 ** (m - 1)])
    if frame is not None:
        u = np.asarray([np.asarray(getattr(x, "data", x)) for x in frame])
        P = np.einsum("mab,mkbc,mdc->mkad", u, P, u.conj())
    return P


def _qubit_count(d: int) -> int:
    return QuditIndexCodec.for_dim(d).n_qubits


def epr_joint_table(pairs, setting: int, offsets=None, bob_frame=None) -> JointProbabilityTable:
    """Joint outcome table for N photon pairs measured qubit-wise.

    Parameters
    ----------
    pairs : sequence of DensityMatrix
        Two-qubit state of each pair, (Alice_m, Bob_m) order.
    setting : {1, 2}
        Computational (polarizer only) or Fourier (wave plates) measurement.
    offsets : tuple, optional
        ``(alice_offsets, bob_offsets)`` HWP angle perturbations, see
        :func:`projector_stack`.
    bob_frame : sequence of 2x2 unitaries, optional
        Rotates Bob's measurement basis qubit by qubit.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    if setting not in (1, 2):
        raise ValueError(f"setting must be 1 or 2, got {setting}")
    for p in pairs:
        if not isinstance(p, DensityMatrix) or p.dim != 4:
            raise ValueError("each pair must be a 4x4 DensityMatrix")
    n = len(pairs)
    a_off, b_off = offsets if offsets is not None else (None, None)
    A = projector_stack(n, setting, a_off)
    B = projector_stack(n, setting, b_off, frame=bob_frame)
    rho = np.stack([p.data for p in pairs])
    return JointProbabilityTable(setting, kernels.epr_table(A, B, rho))


def ss_joint_table(source, setting: int, channel=IDENTITY, offsets=None) -> JointProbabilityTable:
    """Joint table for single-system steering.

    Alice measures each source qubit (giving P(a)), re-prepares the qubit in
    the state matching her outcome, the qubit passes through ``channel`` and
    Bob measures it in the same setting.

    ``source`` is a list of per-qubit 2x2 DensityMatrix objects; ``channel``
    is a single :class:`Channel` or one per qubit.
    """
    qubits = list(source)
    if not qubits:
        raise ValueError("need at least one source qubit")
    if setting not in (1, 2):
        raise ValueError(f"setting must be 1 or 2, got {setting}")
    n = len(qubits)
    chans = list(channel) if isinstance(channel, (list, tuple)) else [channel] * n
    if len(chans) != n:
        raise ValueError(f"got {len(chans)} channels for {n} qubits")
    chans = [Channel.parse(c) if not callable(c) else c for c in chans]
    a_off, b_off = offsets if offsets is not None else (None, None)
    A = projector_stack(n, setting, a_off)
    B = projector_stack(n, setting, b_off)
    d = 2**n
    factors = np.empty((n, d, d))
    for m in range(n):
        rho = qubits[m].data
        p_alice = np.einsum("kab,ba->k", A[m], rho).real
        sent = np.stack([chans[m](A[m, k]) for k in range(d)])
        p_bob = np.einsum("lab,kba->kl", B[m], sent).real
        factors[m] = p_alice[:, None] * p_bob
    return JointProbabilityTable(setting, np.clip(kernels.product_table(factors), 0.0, 1.0))


def correlation_mask(kind: str, setting: int, d: int) -> np.ndarray:
    """Cells counted by the witness: a == b, except EPR setting 2 uses a + b = 0 mod d."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    a, b = np.indices((d, d))
    if kind == "epr" and setting == 2:
        return (a + b) % d == 0
    return a == b


def _check_pair(t1: JointProbabilityTable, t2: JointProbabilityTable):
    if t1.d != t2.d:
        raise ValueError(f"tables have different dimensions {t1.d} and {t2.d}")
    if (t1.setting, t2.setting) != (1, 2):
        raise ValueError("expected tables for settings 1 and 2, in that order")


def kernel(kind: str, t1: JointProbabilityTable, t2: JointProbabilityTable) -> float:
    _check_pair(t1, t2)
    d = t1.d
    return float(
        t1.entries[correlation_mask(kind, 1, d)].sum() + t2.entries[correlation_mask(kind, 2, d)].sum()
    )


def kernel_epr(t1, t2) -> float:
    return kernel("epr", t1, t2)


def kernel_ss(t1, t2) -> float:
    return kernel("ss", t1, t2)


def classical_bound(d: int) -> float:
    """Largest kernel reachable by local-hidden-state mimicry, 1 + 1/sqrt(d)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return 1.0 + 1.0 / float(np.sqrt(d))


def ratio(kernel_value: float, d: int) -> float:
    return kernel_value / classical_bound(d)


@dataclass(frozen=True)
class WitnessReport:
    kind: str
    d: int
    kernel: float
    stderr: float
    bound: float
    ratio: float
    steerable: bool
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


VERDICT_ATOL = 1e-9


def report(kind: str, kernel_value: float, stderr: float, d: int, z: float = 3.0, seed=None) -> WitnessReport:
    """Assemble the bound, ratio and verdict for one measured kernel.

    The source counts as steerable when the kernel clears the bound by more
    than ``z`` standard errors (plus ``VERDICT_ATOL`` for exact evaluation).
    """
    if not -ATOL <= kernel_value <= 2.0 + ATOL:
        raise ValueError(f"kernel {kernel_value} outside [0, 2]")
    if stderr < 0:
        raise ValueError("stderr must be non-negative")
    bound = classical_bound(d)
    steerable = bool(kernel_value - bound > z * stderr + VERDICT_ATOL)
    return WitnessReport(
        kind=kind,
        d=int(d),
        kernel=float(kernel_value),
        stderr=float(stderr),
        bound=bound,
        ratio=float(ratio(kernel_value, d)),
        steerable=steerable,
        seed=seed,
    )


def epr_tables(pairs, offsets=None, bob_frame=None):
    return tuple(epr_joint_table(pairs, s, offsets=offsets, bob_frame=bob_frame) for s in (1, 2))


def ss_tables(source, channel=IDENTITY, offsets=None):
    return tuple(ss_joint_table(source, s, channel=channel, offsets=offsets) for s in (1, 2))


def ground_source(n: int) -> list[DensityMatrix]:
    """Every qubit prepared in |H> = |0>."""
    return [DensityMatrix(np.diag([1.0, 0.0]))] * n


def exact_epr_kernel(d: int, pair: DensityMatrix | None = None) -> float:
    pair = BELL_PAIR.projector() if pair is None else pair
    return kernel_epr(*epr_tables([pair] * _qubit_count(d)))


def exact_ss_kernel(d: int, channel=IDENTITY, reduced_dim: int | None = None) -> float:
    n = _qubit_count(d)
    if reduced_dim is not None:
        base = Channel.parse(channel)
        chans = [lambda r, c=c: base(c(r)) for c in restricted_preparation(n, reduced_dim)]
    else:
        chans = channel
    return kernel_ss(*ss_tables(ground_source(n), channel=chans))
