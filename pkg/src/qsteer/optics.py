"""Jones-calculus model of the wave-plate + polarizer measurement chain.

Polarization is mapped to logical qubits as |H> = |0>, |V> = |1>. Every angle
here is in radians.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qstate import DensityMatrix, UnitaryMatrix

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)
POLARIZATION = {"H": 0, "V": 1}
QWP_ANGLE = -np.pi / 4


def hwp_array(theta: float) -> np.ndarray:
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, -s], [-s, -c]], dtype=complex)


def qwp_array(gamma: float) -> np.ndarray:
    # the textbook form has |det| = 2; the 1/sqrt(2) makes it unitary
    c, s = np.cos(2 * gamma), np.sin(2 * gamma)
    return np.array([[1j - c, s], [s, 1j + c]], dtype=complex) / np.sqrt(2)


def hwp(theta: float) -> UnitaryMatrix:
    """Half-wave plate with fast axis at ``theta``."""
    return UnitaryMatrix(hwp_array(theta))


def qwp(gamma: float) -> UnitaryMatrix:
    """Quarter-wave plate with fast axis at ``gamma``."""
    return UnitaryMatrix(qwp_array(gamma))


def waveplate_unit_array(theta: float) -> np.ndarray:
    return hwp_array(theta) @ qwp_array(QWP_ANGLE)


def waveplate_unit(theta: float) -> UnitaryMatrix:
    """QWP at -pi/4 followed by a HWP at ``theta``."""
    return UnitaryMatrix(waveplate_unit_array(theta))


def waveplate_unit_closed_form(theta: float) -> np.ndarray:
    """Closed form of :func:`waveplate_unit`, equal to it up to a global phase.

    Row H is -(<H| + e^{i(4 theta + pi/2)}<V|)/sqrt(2), row V is
    i(<H| - e^{i(4 theta + pi/2)}<V|)/sqrt(2).
    """
    e = np.exp(1j * (4 * theta + np.pi / 2))
    return np.array([[-1.0, -e], [1j, -1j * e]], dtype=complex) / np.sqrt(2)


def solve_hwp_angle(m: int, k: int) -> float:
    """HWP angle that rotates the qubit-``m`` Fourier factor of outcome ``k`` onto |H>."""
    if m < 1:
        raise ValueError(f"qubit position must be >= 1, got {m}")
    if k < 0:
        raise ValueError(f"outcome must be >= 0, got {k}")
    return -np.pi / 8 - np.pi * k / 2 ** (m + 1)


class Plate(str, Enum):
    HWP = "HWP"
    QWP = "QWP"


@dataclass(frozen=True)
class WavePlateProgram:
    """Wave plates in the order the photon traverses them."""

    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        elements = tuple((Plate(kind), float(angle)) for kind, angle in self.elements)
        if not elements:
            raise ValueError("wave-plate program is empty")
        if not all(np.isfinite(a) for _, a in elements):
            raise ValueError("wave-plate angles must be finite")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def fourier(cls, m: int, k: int, offset: float = 0.0) -> "WavePlateProgram":
        return cls(((Plate.QWP, QWP_ANGLE), (Plate.HWP, solve_hwp_angle(m, k) + offset)))

    def matrix(self) -> np.ndarray:
        U = np.eye(2, dtype=complex)
        for kind, angle in self.elements:
            U = (hwp_array(angle) if kind is Plate.HWP else qwp_array(angle)) @ U
        return U

    def unitary(self) -> UnitaryMatrix:
        return UnitaryMatrix(self.matrix())


def projector_array(setting: int, m: int, k: int, offset: float = 0.0) -> np.ndarray:
    """Raw 2x2 projector used by the table builders.

    Setting 1 takes the bit ``j_m`` and projects with a polarizer. Setting 2
    takes the full outcome index ``k``: the plates are set for the residue
    ``k mod 2**(m-1)`` and bit ``m`` of the residue ``k mod 2**m`` picks the
    H or V port. With ``offset == 0`` this equals U(theta)^dag |H><H| U(theta)
    for theta = solve_hwp_angle(m, k). ``offset`` perturbs the HWP angle.
    """
    if setting == 1:
        if k not in (0, 1):
            raise ValueError(f"setting-1 outcome must be a bit, got {k}")
        P = np.zeros((2, 2), dtype=complex)
        P[k, k] = 1.0
        return P
    if setting == 2:
        if m < 1 or k < 0:
            raise ValueError(f"invalid qubit position {m} or outcome {k}")
        half = 2 ** (m - 1)
        residue = k % half
        port = H if (k % (2 * half)) < half else V
        U = WavePlateProgram.fourier(m, residue, offset).matrix()
        row = port @ U
        return np.outer(row.conj(), row)
    raise ValueError(f"setting must be 1 or 2, got {setting}")


def measurement_projector(setting: int, m: int, k: int, offset: float = 0.0) -> DensityMatrix:
    return DensityMatrix(projector_array(setting, m, k, offset))


def pair_joint_probability(rho_pair: DensityMatrix, projA, projB) -> float:
    """Tr[(projA (x) projB) rho_pair] for one photon pair."""
    A = projA.data if isinstance(projA, DensityMatrix) else np.asarray(projA)
    B = projB.data if isinstance(projB, DensityMatrix) else np.asarray(projB)
    if rho_pair.dim != A.shape[0] * B.shape[0]:
        raise ValueError(f"pair state has dim {rho_pair.dim}, projectors give {A.shape[0] * B.shape[0]}")
    p = float(np.einsum("ij,ji->", np.kron(A, B), rho_pair.data).real)
    return min(max(p, 0.0), 1.0)
