"""Lax matrix of the rational C_n Ruijsenaars-Schneider-van Diejen model.

The matrix is the Sutherland ``e^{2Q}`` seen in the eigenframe of ``L``,
rewritten purely in terms of the dual coordinates ``(lambda, theta)``: a
Cauchy-like matrix with a diagonal ``g - g2`` correction in the off-diagonal
blocks. It is Hermitian, positive definite, satisfies ``A C A = C`` and has
unit determinant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit as mk
from .errors import DegenerateLambda, SingularMatrix
from .lax import _doubled, c_matrix
from .model import CouplingParams, PhasePoint
from .scattering import spectral_frame, z_closed_form

__all__ = [
    "DualCoordinates",
    "build_dual_lax",
    "rsvd_hamiltonian",
    "rsvd_hamiltonian_trace",
    "dual_coordinates",
    "dual_consistency_residual",
    "is_in_u_nn_minus_group",
]


@dataclass(frozen=True)
class DualCoordinates:
    lam: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, float).ravel()
        theta = np.array(self.theta, float).ravel()
        if lam.shape != theta.shape:
            raise ValueError("lambda and theta differ in length")
        if lam.size == 0 or np.any(lam <= 0) or np.any(np.diff(lam) >= 0):
            raise DegenerateLambda(f"need lambda_1 > ... > lambda_n > 0, got {lam}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return self.lam.size


def build_dual_lax(dc: DualCoordinates, cp: CouplingParams) -> np.ndarray:
    lam, th = dc.lam, dc.theta
    n = dc.n
    g = cp.g
    z = z_closed_form(lam, cp)
    az = np.abs(z)
    ig2 = 2j * g
    A = np.empty((2 * n, 2 * n), complex)
    dl = lam[:, None] - lam[None, :]
    sl = lam[:, None] + lam[None, :]
    A[:n, :n] = np.exp(th[:, None] + th[None, :]) * np.sqrt(np.outer(az, az)) * ig2 / (ig2 + dl)
    A[n:, n:] = (np.exp(-th[:, None] - th[None, :]) * np.outer(z.conj(), z)
                 / np.sqrt(np.outer(az, az)) * ig2 / (ig2 - dl))
    upper = (np.exp(th[:, None] - th[None, :]) * z[None, :] * np.sqrt(np.outer(az, 1 / az))
             * ig2 / (ig2 + sl))
    upper += np.diag(1j * (g - cp.g2) / (1j * g + lam))
    A[:n, n:] = upper
    A[n:, :n] = upper.conj().T
    return A


def rsvd_hamiltonian(dc: DualCoordinates, cp: CouplingParams) -> float:
    lam = dc.lam
    off = ~np.eye(dc.n, dtype=bool)
    dl = np.where(off, lam[:, None] - lam[None, :], 1.0)
    sl = lam[:, None] + lam[None, :]
    pair = np.where(off, np.sqrt((1 + 4 * cp.g**2 / dl**2) * (1 + 4 * cp.g**2 / sl**2)), 1.0)
    ext = np.sqrt(1 + cp.g2**2 / lam**2)
    return float(np.sum(np.cosh(2 * dc.theta) * ext * pair.prod(axis=1)))


def rsvd_hamiltonian_trace(A_check, imag_tol: float = 1e-12) -> float:
    """``tr(A + A^-1) / 4``."""
    A = mk.as_matrix(A_check)
    scale = max(1.0, mk.fro(A))
    if mk.is_singular(A):
        raise SingularMatrix("dual Lax matrix is numerically singular")
    tr = (np.trace(A) + np.trace(np.linalg.inv(A))) / 4.0
    if abs(tr.imag) > imag_tol * scale:
        raise ValueError(f"trace has imaginary part {tr.imag:.3e}")
    return float(tr.real)


def dual_coordinates(pp: PhasePoint, cp: CouplingParams) -> DualCoordinates:
    frame = spectral_frame(pp, cp)
    return DualCoordinates(frame.lam, frame.theta)


def dual_consistency_residual(pp: PhasePoint, cp: CouplingParams, relative: bool = False) -> float:
    """Distance between the dual Lax matrix at the dual coordinates of ``pp`` and
    ``U^* e^{2Q} U`` computed in the eigenframe."""
    frame = spectral_frame(pp, cp)
    dc = DualCoordinates(frame.lam, frame.theta)
    a = np.exp(2.0 * _doubled(pp.q))
    numeric = frame.U.conj().T @ (a[:, None] * frame.U)
    r = mk.fro(build_dual_lax(dc, cp) - numeric)
    return r / mk.fro(numeric) if relative else r


def is_in_u_nn_minus_group(A, tol: float = 1e-9) -> bool:
    """Hermitian with ``A C A = C``."""
    A = mk.as_matrix(A)
    C = c_matrix(A.shape[0] // 2)
    scale = max(1.0, mk.fro(A)) ** 2
    return mk.is_hermitian(A, tol * scale) and mk.fro(A @ C @ A - C) <= tol * scale
