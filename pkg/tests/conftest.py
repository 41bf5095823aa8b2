import numpy as np
import pytest

from cn_sutherland.model import CouplingParams, PhasePoint


def random_point(rng, n, min_gap=0.4, spread=1.0, pmax=1.5):
    q = np.cumsum(min_gap + rng.uniform(0.0, spread, n))[::-1]
    return PhasePoint(q, rng.uniform(-pmax, pmax, n))


def random_couplings(rng, lo=0.2, hi=2.0):
    """Couplings with |g|, |g2| in [lo, hi] away from g2 = 2g."""
    while True:
        g = rng.choice([-1, 1]) * rng.uniform(lo, hi)
        g2 = rng.choice([-1, 1]) * rng.uniform(lo, hi)
        if abs(g2 - 2 * g) > 0.1:
            return CouplingParams(g, g2)


def random_hermitian(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X + X.conj().T


def random_unitary(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cp():
    return CouplingParams(0.7, -1.3)


@pytest.fixture
def pp3():
    return PhasePoint([2.1, 1.2, 0.4], [0.9, -0.3, 0.5])


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
