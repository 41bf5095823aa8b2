"""Lax matrices of the C_n Sutherland model on ``C^N``, ``N = 2n``.

Everything is built from the diagonal matrix ``Q = diag(q, -q)``. Operator
functions ``f(ad_Q)`` act on off-diagonal matrices entrywise,
``(f(ad_Q) X)_kl = f(Q_kk - Q_ll) X_kl``, so no matrix-function machinery is
needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, OutOfChamber
from .model import CouplingParams, PhasePoint, Trajectory, coth, csch, csch2, in_weyl_chamber

__all__ = [
    "LaxData",
    "c_matrix",
    "e_vector",
    "q_matrix",
    "p_matrix",
    "build_xi",
    "build_calL",
    "build_B",
    "build_L",
    "lax_data",
    "phi",
    "in_u_nn_minus",
    "in_u_nn_plus",
    "lax_residual",
    "commutation_residual",
]


def c_matrix(n: int) -> np.ndarray:
    """The form ``C = [[0, 1_n], [1_n, 0]]`` defining ``U(n, n)``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]]).astype(np.complex128)


def e_vector(n: int) -> np.ndarray:
    return np.concatenate([np.ones(n), -np.ones(n)]).astype(np.complex128)


def _doubled(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v, -v], axis=-1)


def q_matrix(q) -> np.ndarray:
    return np.diag(_doubled(np.asarray(q, float))).astype(np.complex128)


def p_matrix(p) -> np.ndarray:
    return np.diag(_doubled(np.asarray(p, float))).astype(np.complex128)


def in_u_nn_minus(X, tol: float = 1e-13) -> bool:
    """Hermitian and anticommuting with ``C``."""
    X = np.asarray(X)
    C = c_matrix(X.shape[0] // 2)
    scale = max(1.0, np.linalg.norm(X))
    return bool(np.linalg.norm(X - X.conj().T) <= tol * scale
                and np.linalg.norm(X @ C + C @ X) <= tol * scale)


def in_u_nn_plus(X, tol: float = 1e-13) -> bool:
    """Anti-Hermitian and commuting with ``C``."""
    X = np.asarray(X)
    C = c_matrix(X.shape[0] // 2)
    scale = max(1.0, np.linalg.norm(X))
    return bool(np.linalg.norm(X + X.conj().T) <= tol * scale
                and np.linalg.norm(X.conj().T @ C + C @ X) <= tol * scale)


def build_xi(cp: CouplingParams, n: int) -> np.ndarray:
    """``xi = i g (E E^* - 1_N) + i (g - g2) C``; anti-Hermitian, zero diagonal."""
    E = e_vector(n)
    N = 2 * n
    return 1j * cp.g * (np.outer(E, E.conj()) - np.eye(N)) + 1j * (cp.g - cp.g2) * c_matrix(n)


def _differences(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Differences ``Q_kk - Q_ll`` with the diagonal replaced by 1 (masked out later)."""
    d = _doubled(q)
    D = d[..., :, None] - d[..., None, :]
    off = ~np.eye(d.shape[-1], dtype=bool)
    D = np.where(off, D, 1.0)
    return D, off


def _check(q):
    if not in_weyl_chamber(q):
        raise OutOfChamber(f"q = {np.asarray(q)} is not in the Weyl chamber")


def _diag_embed(v: np.ndarray) -> np.ndarray:
    N = v.shape[-1]
    out = np.zeros(v.shape + (N,), dtype=np.complex128)
    idx = np.arange(N)
    out[..., idx, idx] = v
    return out


def _calL_batch(q, p, xi):
    D, off = _differences(q)
    return _diag_embed(_doubled(p)) - np.where(off, coth(D) * xi, 0.0)


def _L_batch(q, p, xi):
    D, off = _differences(q)
    return _diag_embed(_doubled(p)) - np.where(off, csch(D) * xi, 0.0)


def phi(q, cp: CouplingParams) -> np.ndarray:
    """The diagonal functions ``phi_c`` entering ``B`` (vectorised over leading axes)."""
    q = np.asarray(q, float)
    diff = q[..., :, None] - q[..., None, :]
    summ = q[..., :, None] + q[..., None, :]
    n = q.shape[-1]
    off = ~np.eye(n, dtype=bool)
    pair = np.where(off, csch2(np.where(off, diff, 1.0)) + csch2(summ), 0.0).sum(axis=-1)
    return -cp.g * pair - cp.g2 * csch2(2.0 * q)


def _B_batch(q, xi, cp):
    D, off = _differences(q)
    ph = phi(q, cp)
    return _diag_embed(1j * np.concatenate([ph, ph], axis=-1)) + np.where(off, csch2(D) * xi, 0.0)


def build_calL(pp: PhasePoint, cp: CouplingParams, xi=None) -> np.ndarray:
    """``P - coth(ad_Q) xi``. ``xi`` may be injected (defaults to :func:`build_xi`)."""
    _check(pp.q)
    xi = build_xi(cp, pp.n) if xi is None else np.asarray(xi, np.complex128)
    return _calL_batch(pp.q, pp.p, xi)


def build_B(pp: PhasePoint, cp: CouplingParams, xi=None) -> np.ndarray:
    _check(pp.q)
    xi = build_xi(cp, pp.n) if xi is None else np.asarray(xi, np.complex128)
    return _B_batch(pp.q, xi, cp)


def build_L(pp: PhasePoint, cp: CouplingParams, xi=None) -> np.ndarray:
    """``L = P - sinh(ad_Q)^-1 xi = cosh(ad_Q)^-1 calL``; traceless, Hermitian."""
    _check(pp.q)
    xi = build_xi(cp, pp.n) if xi is None else np.asarray(xi, np.complex128)
    return _L_batch(pp.q, pp.p, xi)


@dataclass(frozen=True)
class LaxData:
    Q: np.ndarray
    P: np.ndarray
    xi: np.ndarray
    calL: np.ndarray
    B: np.ndarray
    L: np.ndarray


def lax_data(pp: PhasePoint, cp: CouplingParams, xi=None) -> LaxData:
    _check(pp.q)
    xi = build_xi(cp, pp.n) if xi is None else np.asarray(xi, np.complex128)
    return LaxData(q_matrix(pp.q), p_matrix(pp.p), xi,
                   _calL_batch(pp.q, pp.p, xi), _B_batch(pp.q, xi, cp), _L_batch(pp.q, pp.p, xi))


def lax_residual(traj: Trajectory, cp: CouplingParams, relative: bool = False, order: int = 2) -> float:
    """Largest defect of the Lax equation ``d calL/dt = [calL, B]`` on the grid.

    The time derivative is a central difference between neighbouring samples
    (``order`` 2, or the five-point stencil with ``order`` 4), so the check
    does not reuse the equations of motion. With ``relative`` each defect is
    divided by ``|calL(t)|_F``. The grid must be uniform.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    width = order // 2
    if len(traj) < 2 * width + 1:
        raise GridTooCoarse(f"need at least {2 * width + 1} grid points")
    t = np.asarray(traj.times, float)
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise GridTooCoarse("grid is not uniform")
    for qk in traj.q:
        _check(qk)
    xi = build_xi(cp, traj.q.shape[1])
    cL = _calL_batch(traj.q, traj.p, xi)
    h = dt[0]
    if order == 2:
        deriv = (cL[2:] - cL[:-2]) / (2.0 * h)
    else:
        deriv = (cL[:-4] - 8.0 * cL[1:-3] + 8.0 * cL[3:-1] - cL[4:]) / (12.0 * h)
    mid = cL[width:-width]
    B = _B_batch(traj.q[width:-width], xi, cp)
    defect = np.linalg.norm(deriv - (mid @ B - B @ mid), axis=(-2, -1))
    if relative:
        defect = defect / np.linalg.norm(mid, axis=(-2, -1))
    return float(defect.max())


def commutation_residual(pp: PhasePoint, cp: CouplingParams, xi=None, relative: bool = False) -> float:
    """Frobenius defect of ``2ig A + LA - AL = 2ig (e^Q E)(e^Q E)^* + 2i(g - g2) C``, ``A = e^{2Q}``.

    ``L`` is built from ``xi`` (injectable, for negative controls); the right
    side always uses the exact couplings. ``relative`` divides by
    ``|A|_F (|g| + |L|_F)``.
    """
    _check(pp.q)
    n = pp.n
    L = build_L(pp, cp, xi)
    eq = np.exp(_doubled(pp.q))
    A = np.diag(eq**2).astype(np.complex128)
    v = eq * e_vector(n)
    lhs = 2j * cp.g * A + L @ A - A @ L
    rhs = 2j * cp.g * np.outer(v, v.conj()) + 2j * (cp.g - cp.g2) * c_matrix(n)
    r = float(np.linalg.norm(lhs - rhs))
    if relative:
        r /= np.linalg.norm(A) * (abs(cp.g) + np.linalg.norm(L))
    return r
