"""Positions from the exponential matrix flow ``e^Q e^{2tL} e^Q``.

The spectrum of the flow at time ``t`` is ``{e^{2 q_c(t)}, e^{-2 q_c(t)}}``
where ``q(t)`` is the Sutherland trajectory through ``(q(0), p(0))``, so
positions are recovered by an eigenvalue problem instead of an ODE solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit as mk
from .errors import ConvergenceFailure, EigenFailure, OutOfChamber, PairingViolation
from .lax import _doubled, build_L
from .model import CouplingParams, IntegratorOptions, PhasePoint, in_weyl_chamber, integrate

__all__ = [
    "FlowSnapshot",
    "PAIRING_TOL",
    "flow_matrix",
    "flow_log_spectrum",
    "flow_positions",
    "snapshot",
    "flow_vs_ode_residual",
]

PAIRING_TOL = 1e-9


def _eigen_L(pp0: PhasePoint, cp: CouplingParams) -> mk.HermitianEigen:
    try:
        return mk.hermitian_eigen(build_L(pp0, cp))
    except ConvergenceFailure as exc:
        raise EigenFailure(str(exc)) from exc


def flow_matrix(pp0: PhasePoint, cp: CouplingParams, t: float) -> np.ndarray:
    """``e^Q exp(2 t L) e^Q`` with the exponential taken through the eigenbasis of ``L``."""
    w, V = _eigen_L(pp0, cp)
    eq = np.exp(_doubled(pp0.q))
    expL = (V * np.exp(2.0 * t * w)) @ V.conj().T
    Y = eq[:, None] * expL * eq[None, :]
    return 0.5 * (Y + Y.conj().T)


def flow_log_spectrum(pp0: PhasePoint, cp: CouplingParams, t: float) -> np.ndarray:
    """Logarithms of the flow eigenvalues, descending.

    In the eigenbasis of ``L`` the flow is similar to ``D K D`` with
    ``D = exp(t Lambda)`` and ``K = V^* e^{2Q} V``; the eigenvalues are taken
    from that graded form so that they stay relatively accurate when they
    span many orders of magnitude (large ``|t|``).
    """
    w, V = _eigen_L(pp0, cp)
    eq = np.exp(_doubled(pp0.q))
    K = V.conj().T @ (eq[:, None] ** 2 * V)
    K = 0.5 * (K + K.conj().T)
    log_d = t * w
    order = np.argsort(-log_d, kind="stable")
    return mk.graded_log_eigenvalues(K[np.ix_(order, order)], log_d[order])


def flow_positions(pp0: PhasePoint, cp: CouplingParams, t: float) -> np.ndarray:
    """Positions ``q(t)`` (descending) recovered from the flow spectrum."""
    logs = flow_log_spectrum(pp0, cp, t)
    n = pp0.n
    defect = np.abs(logs + logs[::-1])
    if defect.max() > PAIRING_TOL * max(1.0, np.abs(logs).max()):
        raise PairingViolation(f"flow eigenvalues are not reciprocal pairs (defect {defect.max():.3e})")
    return 0.5 * logs[:n]


@dataclass(frozen=True)
class FlowSnapshot:
    t: float
    flow_matrix: np.ndarray
    recovered_q: np.ndarray


def snapshot(pp0: PhasePoint, cp: CouplingParams, t: float) -> FlowSnapshot:
    q = flow_positions(pp0, cp, t)
    if not in_weyl_chamber(q):
        raise OutOfChamber(f"recovered positions {q} left the chamber")
    return FlowSnapshot(float(t), flow_matrix(pp0, cp, t), q)


def flow_vs_ode_residual(pp0: PhasePoint, cp: CouplingParams, t_grid,
                         opts: IntegratorOptions | None = None) -> float:
    """Sup-norm distance between flow positions and the integrated trajectory on ``t_grid``."""
    t_grid = np.atleast_1d(np.asarray(t_grid, float))
    ode = np.empty((t_grid.size, pp0.n))
    for sign in (1.0, -1.0):
        mask = (t_grid > 0) if sign > 0 else (t_grid < 0)
        if not mask.any():
            continue
        traj = integrate(pp0, cp, np.abs(t_grid[mask]).max() * sign, opts)
        ode[mask] = traj.dense(t_grid[mask])[: pp0.n].T
    ode[t_grid == 0] = pp0.q
    flow = np.array([flow_positions(pp0, cp, t) for t in t_grid])
    return float(np.abs(flow - ode).max())
