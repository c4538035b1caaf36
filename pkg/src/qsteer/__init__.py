"""Simulation of multidimensional EPR and single-system steering witnesses.

Qudits of dimension d = 2**N are assembled from polarization qubits, measured
through a Jones-calculus wave-plate chain, and the resulting witness kernels
are compared with the best local-hidden-state (classical) value 1 + 1/sqrt(d).
"""
from .classical import LhsStrategy, lhs_bound_exact, lhs_kernel_value, lhs_search, unsteerable_state
from .encoding import (
    QuditIndexCodec,
    computational_basis_state,
    entangled_source,
    fourier_basis_state,
    fourier_qubit_factor,
    supersinglet,
)
from .kernels import BACKEND
from .noise import NoiseSpec, estimate_kernel, sample_counts, simulate, werner_pair
from .qstate import DensityMatrix, StateVector, UnitaryMatrix, tensor
from .witness import (
    JointProbabilityTable,
    WitnessReport,
    classical_bound,
    epr_joint_table,
    kernel_epr,
    kernel_ss,
    ratio,
    report,
    ss_joint_table,
)

__version__ = "0.1.0"
