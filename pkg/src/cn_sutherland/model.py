"""Hyperbolic C_n Sutherland dynamics.

Positions live in the open Weyl chamber ``q_1 > ... > q_n > 0``. The
Hamiltonian is

    H = 1/2 sum p_c^2
        + sum_{a<b} g^2 (sinh^-2(q_a - q_b) + sinh^-2(q_a + q_b))
        + sum_c (g2^2 / 2) sinh^-2(2 q_c).

The factor 1/2 on the external term is the normalisation for which
``H = tr(L^2)/4`` with the Lax matrix of :mod:`cn_sutherland.lax`; with it the
Lax equation holds and ``g2`` enters the scattering phase shifts and the dual
Hamiltonian exactly as written there.

All hyperbolic reciprocals are evaluated through ``exp(-|x|)`` so that
far-separated configurations neither overflow nor produce ``inf/inf``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ChamberExit,
    EnergyDriftExceeded,
    InvalidCoupling,
    OutOfChamber,
    StepUnderflow,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingParams:
    """Coupling pair ``(g, g2)``.

    Both must be non-zero and ``g2 != 2 g``; the latter keeps the spectral
    frame regular. ``epsilon = 1 - g2/g``.
    """

    g: float
    g2: float

    def __post_init__(self):
        g, g2 = float(self.g), float(self.g2)
        if not (np.isfinite(g) and np.isfinite(g2)):
            raise InvalidCoupling("couplings must be finite")
        if g == 0.0 or g2 == 0.0:
            raise InvalidCoupling(f"couplings must be non-zero, got g={g}, g2={g2}")
        if np.isclose(g2, 2.0 * g, rtol=1e-12, atol=0.0):
            raise InvalidCoupling(
                f"g2 = 2g is excluded (g={g}, g2={g2}): the components of F may vanish "
                "and L may fail to be regular; use (g, -g2) instead, it gives the same H"
            )
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g2", g2)

    @property
    def epsilon(self) -> float:
        return 1.0 - self.g2 / self.g


def in_weyl_chamber(q, margin: float = 0.0) -> bool:
    """True iff ``q_1 > ... > q_n > 0`` with every gap (and ``q_n``) above ``margin``."""
    q = np.asarray(q, dtype=float).ravel()
    if q.size == 0 or not np.all(np.isfinite(q)):
        return False
    gaps = np.append(-np.diff(q), q[-1])
    return bool(np.all(gaps > margin))


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).ravel()
        p = np.array(self.p, dtype=float).ravel()
        if q.shape != p.shape:
            raise ValueError(f"q has {q.size} entries, p has {p.size}")
        if not in_weyl_chamber(q):
            raise OutOfChamber(f"q = {q} is not in the Weyl chamber q_1 > ... > q_n > 0")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def reversed(self) -> "PhasePoint":
        return PhasePoint(self.q, -self.p)


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    energy_drift_bound: float = 1e-8
    grid_points: int = 201
    method: str = "DOP853"

    @classmethod
    def from_dict(cls, d: dict) -> "IntegratorOptions":
        known = {k: d[k] for k in ("rel_tol", "abs_tol", "energy_drift_bound", "grid_points", "method") if k in d}
        unknown = set(d) - set(known)
        if unknown:
            raise KeyError(f"unknown integrator option(s): {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class Trajectory:
    """Solution sampled on an output grid. ``times`` strictly monotone in the
    direction of integration (increasing after :meth:`sorted`)."""

    times: np.ndarray
    q: np.ndarray  # (T, n)
    p: np.ndarray  # (T, n)
    energies: np.ndarray
    cp: CouplingParams | None = None
    dense: object = field(default=None, repr=False, compare=False)

    def __len__(self):
        return self.times.size

    @property
    def points(self) -> list[PhasePoint]:
        return [PhasePoint(qi, pi) for qi, pi in zip(self.q, self.p)]

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energies[0])))

    def sorted(self) -> "Trajectory":
        order = np.argsort(self.times)
        return Trajectory(self.times[order], self.q[order], self.p[order], self.energies[order],
                          self.cp, self.dense)

    def sample(self, times) -> "Trajectory":
        """Re-evaluate the continuous solution on another grid."""
        if self.dense is None or self.cp is None:
            raise ValueError("trajectory carries no dense output")
        times = np.asarray(times, dtype=float)
        y = np.atleast_2d(self.dense(times)).T
        n = self.q.shape[1]
        q, p = y[:, :n], y[:, n:]
        return Trajectory(times, q, p, _energy_batch(q, p, self.cp), self.cp, self.dense)


# ---------------------------------------------------------------------------
# stable hyperbolic reciprocals


def csch2(x):
    """``1/sinh(x)^2`` without overflow for large ``|x|``."""
    x = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-2.0 * x)
    return 4.0 * e / (1.0 - e) ** 2


def csch(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    return np.sign(x) * 2.0 * np.exp(-ax) / (1.0 - np.exp(-2.0 * ax))


def coth(x):
    return 1.0 / np.tanh(x)


def _pair_args(q: np.ndarray):
    a, b = np.triu_indices(q.shape[-1], k=1)
    return a, b, q[..., a] - q[..., b], q[..., a] + q[..., b]


def _check_chamber(q):
    if not in_weyl_chamber(q):
        raise OutOfChamber(f"q = {np.asarray(q)} is not in the Weyl chamber")


def _energy_batch(q: np.ndarray, p: np.ndarray, cp: CouplingParams) -> np.ndarray:
    _, _, minus, plus = _pair_args(q)
    pot = cp.g**2 * (csch2(minus) + csch2(plus)).sum(axis=-1)
    pot = pot + 0.5 * cp.g2**2 * csch2(2.0 * q).sum(axis=-1)
    return 0.5 * (p**2).sum(axis=-1) + pot


def hamiltonian(pp: PhasePoint, cp: CouplingParams) -> float:
    _check_chamber(pp.q)
    return float(_energy_batch(pp.q, pp.p, cp))


def _force(q: np.ndarray, cp: CouplingParams) -> np.ndarray:
    # d/dx csch^2(x) = -2 coth(x) csch^2(x)
    n = q.size
    a, b, minus, plus = _pair_args(q)
    fm = 2.0 * cp.g**2 * coth(minus) * csch2(minus) if n > 1 else np.empty(0)
    fp = 2.0 * cp.g**2 * coth(plus) * csch2(plus) if n > 1 else np.empty(0)
    dp = np.zeros(n)
    np.add.at(dp, a, fm + fp)
    np.add.at(dp, b, fp - fm)
    dp += 2.0 * cp.g2**2 * coth(2.0 * q) * csch2(2.0 * q)
    return dp


def equations_of_motion(pp: PhasePoint, cp: CouplingParams) -> tuple[np.ndarray, np.ndarray]:
    """Hamilton's equations: ``(dq, dp) = (p, -grad_q H)``."""
    _check_chamber(pp.q)
    return pp.p.copy(), _force(pp.q, cp)


def integrate(pp0: PhasePoint, cp: CouplingParams, t_final: float,
              opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate from ``t = 0`` to ``t_final`` (either sign) with an adaptive
    embedded Runge-Kutta pair and return the solution on a uniform grid of
    ``opts.grid_points`` samples.
    """
    opts = opts or IntegratorOptions()
    n = pp0.n
    t_final = float(t_final)
    if t_final == 0.0:
        e0 = hamiltonian(pp0, cp)
        return Trajectory(np.zeros(1), pp0.q[None, :].copy(), pp0.p[None, :].copy(), np.array([e0]), cp)

    def rhs(_t, y):
        return np.concatenate([y[n:], _force(y[:n], cp)])

    grid = np.linspace(0.0, t_final, max(int(opts.grid_points), 2))
    y0 = np.concatenate([pp0.q, pp0.p])
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        sol = solve_ivp(rhs, (0.0, t_final), y0, method=opts.method, t_eval=grid,
                        rtol=opts.rel_tol, atol=opts.abs_tol, dense_output=True)
    if sol.status != 0:
        raise StepUnderflow(f"integration stopped at t={sol.t[-1] if sol.t.size else 0.0}: {sol.message}")
    q = sol.y[:n].T
    p = sol.y[n:].T
    for k in range(q.shape[0]):
        if not in_weyl_chamber(q[k]):
            raise ChamberExit(f"solution left the Weyl chamber near t={grid[k]}; tighten tolerances")
    energies = _energy_batch(q, p, cp)
    traj = Trajectory(grid, q, p, energies, cp, sol.sol)
    drift = traj.energy_drift
    bound = opts.energy_drift_bound * max(1.0, abs(energies[0]))
    if drift > bound:
        raise EnergyDriftExceeded(f"energy drift {drift:.3e} exceeds {bound:.3e}")
    return traj
