import numpy as np
import pytest
from scipy.linalg import expm

from cn_sutherland import matrixkit as mk
from cn_sutherland.errors import PairingViolation
from cn_sutherland.lax import build_L
from cn_sutherland.model import CouplingParams, PhasePoint, in_weyl_chamber
from cn_sutherland.scattering import asymptotic_data, spectral_frame
from cn_sutherland.specflow import (
    flow_log_spectrum,
    flow_matrix,
    flow_positions,
    flow_vs_ode_residual,
    snapshot,
)

from .conftest import random_couplings, random_point


def test_flow_at_zero_is_exp_2Q(pp3, cp):
    Y = flow_matrix(pp3, cp, 0.0)
    np.testing.assert_allclose(Y, np.diag(np.exp(2 * np.concatenate([pp3.q, -pp3.q]))), atol=1e-12)
    np.testing.assert_allclose(flow_positions(pp3, cp, 0.0), pp3.q, atol=1e-13)


def test_flow_matrix_vs_scipy_expm(pp3, cp):
    t = 0.7
    eq = np.diag(np.exp(np.concatenate([pp3.q, -pp3.q])))
    ref = eq @ expm(2 * t * build_L(pp3, cp)) @ eq
    Y = flow_matrix(pp3, cp, t)
    assert mk.fro(Y - ref) <= 1e-12 * mk.fro(ref)
    assert mk.is_positive_definite(Y)


def test_flow_determinant_is_one(pp3, cp):
    for t in (-3.0, 0.5, 2.0):
        assert abs(mk.determinant(flow_matrix(pp3, cp, t)) - 1) <= 1e-11 * np.exp(4 * pp3.q.sum())
    for t in (-40.0, -5.0, 5.0, 40.0):
        assert abs(flow_log_spectrum(pp3, cp, t).sum()) <= 1e-11 * 40


def test_n1_two_by_two_closed_form():
    pp = PhasePoint([1.0], [0.0])
    cp = CouplingParams(1.0, 1.0)
    lam = 1 / np.sinh(2.0)
    half_tr = np.cosh(2.0) * np.cosh(2 * lam)
    closed = np.array([half_tr + np.sqrt(half_tr**2 - 1), half_tr - np.sqrt(half_tr**2 - 1)])
    dense = np.sort(np.linalg.eigvalsh(flow_matrix(pp, cp, 1.0)))[::-1]
    np.testing.assert_allclose(dense, closed, rtol=1e-12)
    np.testing.assert_allclose(np.exp(flow_log_spectrum(pp, cp, 1.0)), closed, rtol=1e-12)


def test_reciprocal_pairs(rng):
    for n in range(1, 5):
        cp = random_couplings(rng)
        pp = random_point(rng, n)
        for t in (-30.0, -1.0, 0.3, 12.0, 30.0):
            logs = flow_log_spectrum(pp, cp, t)
            assert np.all(np.diff(logs) <= 0)
            # mu_k mu_{N+1-k} = 1  <=>  log mu_k + log mu_{N+1-k} = 0
            assert np.abs(logs + logs[::-1]).max() <= 1e-10 * max(1.0, np.abs(logs).max())


def test_flow_vs_ode_small_n(rng):
    for n in (1, 2, 3):
        cp = random_couplings(rng)
        pp = random_point(rng, n)
        assert flow_vs_ode_residual(pp, cp, np.linspace(-10, 10, 41)) <= 1e-8


def test_flow_vs_ode_n4(rng):
    cp = CouplingParams(0.6, -1.1)
    pp = random_point(rng, 4)
    assert flow_vs_ode_residual(pp, cp, np.linspace(-10, 10, 21)) <= 1e-7


def test_flow_vs_ode_trivial_grid(pp3, cp):
    assert flow_vs_ode_residual(pp3, cp, [0.0]) <= 1e-13


def test_long_time_slope_and_phase(pp3, cp):
    frame = spectral_frame(pp3, cp)
    slope = (flow_positions(pp3, cp, 50.0) - flow_positions(pp3, cp, 45.0)) / 5.0
    np.testing.assert_allclose(slope, frame.lam, atol=1e-4)
    asym = asymptotic_data(frame)
    np.testing.assert_allclose(flow_positions(pp3, cp, 50.0) - 50 * frame.lam, asym.q_plus, atol=1e-6)
    np.testing.assert_allclose(flow_positions(pp3, cp, -50.0) - 50 * frame.lam, asym.q_minus, atol=1e-6)


def test_recovered_positions_stay_in_chamber(rng):
    for n in range(1, 5):
        cp = random_couplings(rng)
        pp = random_point(rng, n)
        for t in np.linspace(-50, 50, 21):
            snap = snapshot(pp, cp, t)
            assert in_weyl_chamber(snap.recovered_q)


def test_pairing_violation_is_raised(monkeypatch, pp3, cp):
    import cn_sutherland.specflow as sf

    monkeypatch.setattr(sf, "flow_log_spectrum", lambda *a: np.array([3.0, 1.0, 0.5, -0.5, -1.0, -2.0]))
    with pytest.raises(PairingViolation):
        sf.flow_positions(pp3, cp, 1.0)
