"""Numerical laboratory for the classical hyperbolic C_n Sutherland model:
dynamics, Lax representation, spectral recovery of trajectories, factorised
scattering and the dual rational C_n Ruijsenaars-Schneider-van Diejen Lax
matrix."""

from .dual import DualCoordinates, build_dual_lax, rsvd_hamiltonian
from .errors import SutherlandError
from .lax import build_B, build_calL, build_L, build_xi
from .model import CouplingParams, IntegratorOptions, PhasePoint, Trajectory, hamiltonian, integrate
from .scattering import asymptotic_data, delta, spectral_frame, theorem3_residual, z_closed_form
from .specflow import flow_matrix, flow_positions

__version__ = "0.1.0"

__all__ = [
    "CouplingParams",
    "DualCoordinates",
    "IntegratorOptions",
    "PhasePoint",
    "SutherlandError",
    "Trajectory",
    "asymptotic_data",
    "build_B",
    "build_L",
    "build_calL",
    "build_dual_lax",
    "build_xi",
    "delta",
    "flow_matrix",
    "flow_positions",
    "hamiltonian",
    "integrate",
    "rsvd_hamiltonian",
    "spectral_frame",
    "theorem3_residual",
    "z_closed_form",
]
