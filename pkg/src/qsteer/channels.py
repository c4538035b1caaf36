"""Memoryless single-qubit channels applied to Bob-side qubits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Channel:
    kind: str = "identity"
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("identity", "depolarizing", "dephasing"):
            raise ValueError(f"unknown channel {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"channel strength must lie in [0, 1], got {self.p}")

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        if self.kind == "identity" or self.p == 0.0:
            return rho
        if self.kind == "depolarizing":
            return (1 - self.p) * rho + self.p * np.trace(rho) * np.eye(2) / 2
        return (1 - self.p) * rho + self.p * np.diag(np.diag(rho))

    @classmethod
    def parse(cls, spec) -> "Channel":
        """Build from ``None``, a name, or a mapping like ``{"type": "depolarizing", "p": 0.1}``."""
        if spec is None:
            return cls()
        if isinstance(spec, Channel):
            return spec
        if isinstance(spec, str):
            return cls(spec)
        spec = dict(spec)
        return cls(spec.pop("type", "identity"), float(spec.pop("p", 0.0)))

    def to_dict(self) -> dict:
        return {"type": self.kind, "p": self.p}


IDENTITY = Channel()


def depolarizing(p: float) -> Channel:
    return Channel("depolarizing", p)


def dephasing(p: float = 1.0) -> Channel:
    return Channel("dephasing", p)


def restricted_preparation(n_qubits: int, reduced_dim: int) -> list[Channel]:
    """Per-qubit channels for a sender limited to ``reduced_dim``-level preparations.

    The leading log2(reduced_dim) qubits stay coherent; the remaining ones can
    only carry computational-basis states and are fully dephased.
    """
    n_keep = int(reduced_dim).bit_length() - 1
    if reduced_dim < 1 or 2**n_keep != reduced_dim or n_keep > n_qubits:
        raise ValueError(f"reduced dimension {reduced_dim} must be a power of 2 dividing 2**{n_qubits}")
    return [IDENTITY] * n_keep + [dephasing(1.0)] * (n_qubits - n_keep)
