"""Noise models and finite-statistics simulation of the steering runs.

Random streams are derived from ``numpy.random.SeedSequence(seed,
spawn_key=...)`` with a PCG64 generator; the spawn key names the purpose
(coincidence counts for a given setting, or wave-plate jitter for a given
party), so one 64-bit seed fixes every draw and the order in which streams
are consumed cannot change the results.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import Channel, restricted_preparation
from .encoding import BELL_PAIR, QuditIndexCodec
from .qstate import ATOL, DensityMatrix
from .witness import (
    JointProbabilityTable,
    WitnessReport,
    correlation_mask,
    epr_tables,
    ground_source,
    kernel,
    report,
    ss_tables,
)

RNG_NAME = "numpy.PCG64/SeedSequence"
_JITTER_KEY = 3


@dataclass(frozen=True)
class NoiseSpec:
    visibility: float = 1.0
    angle_jitter: float = 0.0
    channel: Channel = field(default_factory=Channel)

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")
        if not self.angle_jitter >= 0.0:
            raise ValueError(f"angle jitter must be >= 0, got {self.angle_jitter}")
        object.__setattr__(self, "channel", Channel.parse(self.channel))


@dataclass(frozen=True, eq=False)
class CountRecord:
    setting: int
    counts: np.ndarray
    shots: int
    seed: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.min() < 0 or int(c.sum()) != self.shots:
            raise ValueError("counts must be non-negative and sum to the number of shots")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def d(self) -> int:
        return self.counts.shape[0]

    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def werner_pair(v: float) -> DensityMatrix:
    """v |phi><phi| + (1 - v) I/4 for the Bell pair |phi> = (|00> + |11>)/sqrt(2)."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    return DensityMatrix(v * BELL_PAIR.projector().data + (1 - v) * np.eye(4) / 4)


def werner_fidelity(v: float) -> float:
    return (1 + 3 * v) / 4


def visibility_for_fidelity(f: float) -> float:
    return (4 * f - 1) / 3


def werner_epr_kernel(v: float, n_pairs: int) -> float:
    """Closed-form EPR kernel of N Werner pairs: each setting gives ((1 + v)/2)**N."""
    return 2 * ((1 + v) / 2) ** n_pairs


def draw_offsets(n_qubits: int, sigma: float, rng: np.random.Generator):
    """Independent N(0, sigma) HWP offsets, one per (qubit m, plate residue r < 2**(m-1))."""
    return [rng.normal(0.0, sigma, size=2 ** (m - 1)) for m in range(1, n_qubits + 1)]


def jitter_offsets(n_qubits: int, sigma: float, seed: int):
    if sigma == 0:
        return None
    return tuple(draw_offsets(n_qubits, sigma, rng_for(seed, _JITTER_KEY, party)) for party in (0, 1))


def sample_counts(table: JointProbabilityTable, shots: int, seed: int) -> CountRecord:
    """Multinomial coincidence counts over the d*d cells of ``table``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.asarray(table.entries, dtype=float).ravel()
    if abs(p.sum() - 1.0) > ATOL:
        raise ValueError("table is not normalized")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    counts = rng_for(seed, table.setting).multinomial(shots, p)
    return CountRecord(table.setting, counts.reshape(table.entries.shape), shots, int(seed))


def estimate_kernel(records, kind: str) -> tuple[float, float]:
    """Kernel from empirical frequencies and its standard error.

    Each setting contributes the masked frequency sum ``s``; its variance
    under multinomial sampling is ``s (1 - s) / M``. The two settings are
    independent runs, so the variances add.
    """
    r1, r2 = records
    if r1.d != r2.d:
        raise ValueError(f"records have different dimensions {r1.d} and {r2.d}")
    if (r1.setting, r2.setting) != (1, 2):
        raise ValueError("expected records for settings 1 and 2, in that order")
    total, var = 0.0, 0.0
    for rec in (r1, r2):
        s = rec.counts[correlation_mask(kind, rec.setting, rec.d)].sum() / rec.shots
        total += s
        var += s * (1 - s) / rec.shots
    return float(total), float(np.sqrt(var))


def exact_tables(kind: str, d: int, noise: NoiseSpec = NoiseSpec(), seed: int = 0, reduced_dim=None):
    """Exact joint tables for one configuration.

    HWP jitter, when requested, is drawn from ``seed``; with zero jitter no
    random numbers are used.
    """
    n = QuditIndexCodec.for_dim(d).n_qubits
    offsets = jitter_offsets(n, noise.angle_jitter, seed)
    if kind == "epr":
        if reduced_dim is not None:
            raise ValueError("reduced-dimension preparation applies to SS runs only")
        pair = BELL_PAIR.projector() if noise.visibility == 1.0 else werner_pair(noise.visibility)
        return epr_tables([pair] * n, offsets=offsets)
    if kind == "ss":
        chans = [noise.channel] * n
        if reduced_dim is not None:
            chans = [lambda r, a=c, b=noise.channel: b(a(r)) for c in restricted_preparation(n, reduced_dim)]
        return ss_tables(ground_source(n), channel=chans, offsets=offsets)
    raise ValueError(f"kind must be 'epr' or 'ss', got {kind!r}")


def simulate(
    kind: str,
    d: int,
    noise: NoiseSpec = NoiseSpec(),
    shots: int | None = None,
    seed: int = 0,
    z: float = 3.0,
    reduced_dim=None,
) -> WitnessReport:
    """Run one witness measurement; ``shots=None`` evaluates the tables exactly."""
    t1, t2 = exact_tables(kind, d, noise, seed, reduced_dim)
    if shots is None:
        return report(kind, kernel(kind, t1, t2), 0.0, d, z=z, seed=seed)
    records = (sample_counts(t1, shots, seed), sample_counts(t2, shots, seed))
    value, stderr = estimate_kernel(records, kind)
    return report(kind, value, stderr, d, z=z, seed=seed)

