"""Scattering data of the C_n Sutherland model.

The Lax matrix ``L`` is diagonalised by a unitary ``U`` commuting with ``C``,
``U^* L U = diag(lambda, -lambda)``. In that frame the vector
``F = U^* e^Q E`` and the matrix ``U^* e^{2Q} U`` are explicit in terms of
``lambda`` and a set of phases ``theta``, and the asymptotic phases and
momenta of the trajectory follow in closed form. The factorised scattering
map is then a statement about ``|f_c h_c|``.

Notation: ``x_c = lambda_c / (2 i g)`` (purely imaginary),
``f = F[:n] > 0``, ``h = F[n:]``, ``z = f * conj(h)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit as mk
from .errors import (
    ConvergenceFailure,
    DegenerateLambda,
    DegenerateSpectrum,
    EigenFailure,
    WindowTooSmall,
    ZeroComponent,
    ZeroMomentum,
)
from .lax import _doubled, build_L, c_matrix, e_vector
from .model import CouplingParams, IntegratorOptions, PhasePoint, Trajectory, integrate

__all__ = [
    "DEGENERACY_TOL",
    "ZERO_COMPONENT_TOL",
    "SpectralFrame",
    "AsymptoticData",
    "LineFit",
    "spectral_frame",
    "z_closed_form",
    "z_branch_candidates",
    "omega",
    "z_linear_residual",
    "z_quadratic_residual",
    "check_A_formula",
    "check_A_inverse_formula",
    "check_A_entries_residual",
    "quad_eqn_residual",
    "asymptotic_data",
    "fit_asymptotics",
    "dynamical_asymptotics",
    "theorem3_residual",
    "delta",
    "scattering_report",
]

DEGENERACY_TOL = 1e-8
ZERO_COMPONENT_TOL = 1e-10


@dataclass(frozen=True)
class SpectralFrame:
    lam: np.ndarray
    U: np.ndarray
    F: np.ndarray
    f: np.ndarray
    h: np.ndarray
    z: np.ndarray
    x: np.ndarray
    theta: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.size

    @property
    def x_full(self) -> np.ndarray:
        return np.concatenate([self.x, -self.x])


@dataclass(frozen=True)
class AsymptoticData:
    q_plus: np.ndarray
    p_plus: np.ndarray
    q_minus: np.ndarray
    p_minus: np.ndarray


@dataclass(frozen=True)
class LineFit:
    """Per-particle least-squares line ``q_c(t) ~ phase_c + t slope_c``."""

    phases: np.ndarray
    slopes: np.ndarray
    rms: float


def _check_lambda(lam: np.ndarray) -> None:
    if lam.size == 0 or np.any(lam <= 0) or np.any(np.diff(lam) >= 0):
        raise DegenerateLambda(f"lambda must be positive and strictly decreasing, got {lam}")


def spectral_frame(pp: PhasePoint, cp: CouplingParams, L=None, gauge=None) -> SpectralFrame:
    """Diagonalising frame of ``L`` with the phase convention ``f_c > 0``.

    The eigenvectors for ``-lambda_c`` are taken as ``C u_c``; because ``L``
    anticommutes with ``C`` this gives ``U C = C U``. ``L`` may be injected
    (it must then anticommute with ``C``), and ``gauge`` (a real n-vector
    ``chi``) right-multiplies ``U`` by ``diag(e^{i chi}, e^{i chi})`` before
    the phases are fixed, which must leave every output unchanged.
    """
    n = pp.n
    L = build_L(pp, cp) if L is None else np.asarray(L, np.complex128)
    try:
        w, V = mk.hermitian_eigen(L)
    except ConvergenceFailure as exc:
        raise EigenFailure(str(exc)) from exc
    lam = w[:n].copy()
    gaps = np.concatenate([-np.diff(lam), [2.0 * lam[-1]]])
    if gaps.min() < DEGENERACY_TOL * max(mk.fro(L), 1.0):
        raise DegenerateSpectrum(f"spectrum of L is (nearly) degenerate: min gap {gaps.min():.3e}")
    C = c_matrix(n)
    u = V[:, :n]
    U = np.hstack([u, C @ u])
    if gauge is not None:
        ph = np.exp(1j * np.asarray(gauge, float))
        U = U * np.concatenate([ph, ph])[None, :]
    eq = np.exp(_doubled(pp.q))
    F = U.conj().T @ (eq * e_vector(n))
    if np.abs(F).min() < ZERO_COMPONENT_TOL:
        raise ZeroComponent("a component of F vanishes numerically")
    phase = F[:n] / np.abs(F[:n])
    ph2 = np.concatenate([phase, phase])
    U = U * ph2[None, :]
    F = F * ph2.conj()
    f = F[:n].real.copy()
    h = F[n:].copy()
    z = f * h.conj()
    x = lam / (2j * cp.g)
    theta = np.log(f / np.sqrt(np.abs(z)))
    return SpectralFrame(lam, U, F, f, h, z, x, theta)


def z_closed_form(lam, cp: CouplingParams) -> np.ndarray:
    """``z_c = -(1 + i g2/l_c) prod_{a != c} (1 + 2ig/(l_c - l_a)) (1 + 2ig/(l_c + l_a))``."""
    lam = np.asarray(lam, float).ravel()
    _check_lambda(lam)
    diff = lam[:, None] - lam[None, :]
    summ = lam[:, None] + lam[None, :]
    off = ~np.eye(lam.size, dtype=bool)
    fac = np.where(off, (1 + 2j * cp.g / np.where(off, diff, 1.0)) * (1 + 2j * cp.g / summ), 1.0)
    return -(1 + 1j * cp.g2 / lam) * fac.prod(axis=1)


def _pair_product(x: np.ndarray) -> np.ndarray:
    # prod_{a != c} (1 + 1/(x_c - x_a)) (1 + 1/(x_c + x_a))
    d = x[:, None] - x[None, :]
    s = x[:, None] + x[None, :]
    off = ~np.eye(x.size, dtype=bool)
    return np.where(off, (1 + 1 / np.where(off, d, 1.0)) * (1 + 1 / s), 1.0).prod(axis=1)


def z_branch_candidates(lam, cp: CouplingParams) -> tuple[np.ndarray, np.ndarray]:
    """The two roots ``+(1 + (1+eps)/(2x)) P`` and ``-(1 + (1-eps)/(2x)) P`` of the
    linear/quadratic system for ``z``; the second is the physical branch."""
    lam = np.asarray(lam, float).ravel()
    _check_lambda(lam)
    x = lam / (2j * cp.g)
    eps = cp.epsilon
    prod = _pair_product(x)
    return (1 + (1 + eps) / (2 * x)) * prod, -(1 + (1 - eps) / (2 * x)) * prod


def omega(x) -> np.ndarray:
    x = np.asarray(x, complex)
    d = x[:, None] - x[None, :]
    s = x[:, None] + x[None, :]
    off = ~np.eye(x.size, dtype=bool)
    terms = np.where(off, d * s / np.where(off, (1 + d) * (1 + s), 1.0), 1.0)
    return terms.prod(axis=1)


def z_linear_residual(frame: SpectralFrame, cp: CouplingParams, z=None) -> np.ndarray:
    """``|(1 - 2x) w z + (1 + 2x) conj(w z) + 2 eps|`` per particle."""
    x = frame.x
    z = frame.z if z is None else np.asarray(z, complex)
    wz = omega(x) * z
    return np.abs((1 - 2 * x) * wz + (1 + 2 * x) * wz.conj() + 2 * cp.epsilon)


def z_quadratic_residual(frame: SpectralFrame, cp: CouplingParams, z=None,
                         relative: bool = False) -> np.ndarray:
    """``|4x^2 |w z|^2 + eps (w z + conj(w z)) + eps^2 + 1 - 4x^2|`` per particle.

    ``relative`` divides by the sum of the magnitudes of the terms.
    """
    x = frame.x
    z = frame.z if z is None else np.asarray(z, complex)
    wz = omega(x) * z
    eps = cp.epsilon
    terms = [4 * x**2 * np.abs(wz) ** 2, eps * (wz + wz.conj()), eps**2 + 1 - 4 * x**2]
    r = np.abs(sum(terms))
    if relative:
        r = r / sum(np.abs(t) for t in terms)
    return r


def check_A_formula(frame: SpectralFrame, cp: CouplingParams) -> np.ndarray:
    """Entries ``(F_k conj(F_l) + eps C_kl) / (1 + x_k - x_l)``."""
    F = frame.F
    xf = frame.x_full
    C = c_matrix(frame.n)
    return (np.outer(F, F.conj()) + cp.epsilon * C) / (1 + xf[:, None] - xf[None, :])


def check_A_inverse_formula(frame: SpectralFrame, cp: CouplingParams) -> np.ndarray:
    C = c_matrix(frame.n)
    CF = C @ frame.F
    xf = frame.x_full
    return (np.outer(CF, CF.conj()) + cp.epsilon * C) / (1 - xf[:, None] + xf[None, :])


def _A_numeric(frame: SpectralFrame, pp: PhasePoint, sign: float = 1.0) -> np.ndarray:
    a = np.exp(sign * 2.0 * _doubled(pp.q))
    U = frame.U
    return U.conj().T @ (a[:, None] * U)


def check_A_entries_residual(frame: SpectralFrame, pp: PhasePoint, cp: CouplingParams,
                             relative: bool = False) -> float:
    """Largest Frobenius defect between ``U^* e^{+-2Q} U`` and the entry formulas for
    the transformed matrix and its inverse; ``relative`` scales each by the
    norm of the numerical matrix."""
    out = 0.0
    for sign, formula in ((1.0, check_A_formula), (-1.0, check_A_inverse_formula)):
        num = _A_numeric(frame, pp, sign)
        r = mk.fro(num - formula(frame, cp))
        if relative:
            r /= mk.fro(num)
        out = max(out, r)
    return out


def quad_eqn_residual(frame: SpectralFrame, cp: CouplingParams, diagonal: bool = False) -> float:
    """``max |sum_j A_kj Ainv_jl - delta_kl|`` with both factors from the entry formulas.

    ``diagonal`` restricts the maximum to ``k = l``. The sum cancels terms of
    size up to ``e^{2 max q}``, so the attainable absolute accuracy is about
    ``eps * max_k (|A| |Ainv|)_kk``.
    """
    prod = check_A_formula(frame, cp) @ check_A_inverse_formula(frame, cp)
    dev = prod - np.eye(prod.shape[0])
    return float(np.abs(np.diag(dev) if diagonal else dev).max())


def _correction(x: np.ndarray) -> np.ndarray:
    # sum_{a<c} ln(1 - (x_c - x_a)^-2); the argument is real and > 1
    out = np.zeros(x.size)
    for c in range(x.size):
        for a in range(c):
            out[c] += np.log((1 - (x[c] - x[a]) ** -2).real)
    return out


def asymptotic_data(frame: SpectralFrame) -> AsymptoticData:
    _check_lambda(frame.lam)
    corr = _correction(frame.x)
    q_plus = 0.5 * np.log(np.abs(frame.f) ** 2) - 0.5 * corr
    q_minus = 0.5 * np.log(np.abs(frame.h) ** 2) - 0.5 * corr
    return AsymptoticData(q_plus, frame.lam.copy(), q_minus, -frame.lam)


def fit_asymptotics(traj: Trajectory, window: tuple[float, float]) -> LineFit:
    lo, hi = sorted(float(w) for w in window)
    mask = (traj.times >= lo) & (traj.times <= hi)
    if mask.sum() < 10:
        raise WindowTooSmall(f"only {mask.sum()} samples in [{lo}, {hi}]")
    t = traj.times[mask]
    design = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(design, traj.q[mask], rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - traj.q[mask]) ** 2)))
    return LineFit(coef[0], coef[1], rms)


def dynamical_asymptotics(pp: PhasePoint, cp: CouplingParams, T: float = 20.0,
                          opts: IntegratorOptions | None = None,
                          window_fraction: float = 0.75) -> tuple[AsymptoticData, float]:
    """Asymptotic data from line fits on ``[f T, T]`` and ``[-T, -f T]``.

    Returns the data and the larger of the two fit RMS values.
    """
    opts = opts or IntegratorOptions(grid_points=2001)
    fits = []
    for sign in (1.0, -1.0):
        traj = integrate(pp, cp, sign * T, opts)
        fits.append(fit_asymptotics(traj, (sign * window_fraction * T, sign * T)))
    plus, minus = fits
    data = AsymptoticData(plus.phases, plus.slopes, minus.phases, minus.slopes)
    return data, max(plus.rms, minus.rms)


def delta(p, mu):
    """Two-body phase shift ``ln(1 + 4 mu^2 / p^2) / 2``."""
    p = np.asarray(p, float)
    if np.any(p == 0):
        raise ZeroMomentum("phase shift undefined at zero momentum")
    out = 0.5 * np.log1p(4.0 * np.asarray(mu, float) ** 2 / p**2)
    return float(out) if out.ndim == 0 else out


def theorem3_residual(asym: AsymptoticData, cp: CouplingParams) -> np.ndarray:
    """Defect of the factorised phase-shift relation for each particle."""
    pm = np.asarray(asym.p_minus, float)
    n = pm.size
    out = np.empty(n)
    for c in range(n):
        s = asym.q_plus[c] + asym.q_minus[c] - delta(2 * pm[c], cp.g2)
        for a in range(n):
            if a == c:
                continue
            s -= delta(pm[c] + pm[a], cp.g)
            s += delta(pm[c] - pm[a], cp.g) if a < c else -delta(pm[c] - pm[a], cp.g)
        out[c] = abs(s)
    return out


def scattering_report(pp: PhasePoint, cp: CouplingParams, T: float = 20.0,
                      opts: IntegratorOptions | None = None) -> dict:
    """JSON-ready report of the closed-form and fitted scattering data."""
    frame = spectral_frame(pp, cp)
    closed = asymptotic_data(frame)
    fitted, rms = dynamical_asymptotics(pp, cp, T, opts)

    def as_list(v):
        return [float(a) for a in np.asarray(v).ravel()]

    return {
        "lambda": as_list(frame.lam),
        "q_plus": as_list(closed.q_plus),
        "q_minus": as_list(closed.q_minus),
        "p_plus": as_list(closed.p_plus),
        "p_minus": as_list(closed.p_minus),
        "z_re": as_list(frame.z.real),
        "z_im": as_list(frame.z.imag),
        "theta": as_list(frame.theta),
        "theorem3_residual": as_list(theorem3_residual(closed, cp)),
        "fit_rms": rms,
        "fit": {
            "T": float(T),
            "q_plus": as_list(fitted.q_plus),
            "q_minus": as_list(fitted.q_minus),
            "p_plus": as_list(fitted.p_plus),
            "p_minus": as_list(fitted.p_minus),
            "theorem3_residual": as_list(theorem3_residual(fitted, cp)),
        },
    }
