import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cn_sutherland import matrixkit as mk
from cn_sutherland.errors import (
    ConvergenceFailure,
    DuplicateIndex,
    EqualIndices,
    IndexOutOfRange,
    NonSquare,
    NotHermitian,
    SingularDenominator,
    SingularMatrix,
)

from .conftest import random_hermitian, random_unitary


def laplace_det(A):
    """Independent determinant by recursive cofactor expansion along row 0."""
    n = A.shape[0]
    if n == 1:
        return A[0, 0]
    total = 0j
    for j in range(n):
        sub = np.delete(np.delete(A, 0, axis=0), j, axis=1)
        total += (-1) ** j * A[0, j] * laplace_det(sub)
    return total


def leibniz_det(A):
    n = A.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        term = mk.permutation_sign(perm)
        for i, j in enumerate(perm):
            term *= A[i, j]
        total += term
    return total


def rand_c(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# ---------------------------------------------------------------- eigen


def test_eigen_diagonal_input():
    w, V = mk.hermitian_eigen(np.diag([3.0, 1.0, -2.0]))
    np.testing.assert_allclose(w, [3, 1, -2], atol=1e-15)
    assert np.allclose(np.abs(V), np.eye(3))


def test_eigen_pauli_type():
    w, _ = mk.hermitian_eigen([[0, 1j], [-1j, 0]])
    np.testing.assert_allclose(w, [1, -1], atol=1e-15)


def test_eigen_reconstruction(rng):
    A = random_hermitian(rng, 6)
    w, V = mk.hermitian_eigen(A)
    assert np.all(np.diff(w) <= 0)
    assert mk.fro(A - (V * w) @ V.conj().T) <= 1e-12 * mk.fro(A)
    assert mk.is_unitary(V, 1e-12)


def test_eigen_unitary_conjugation_invariance(rng):
    for n in range(1, 7):
        A = random_hermitian(rng, n)
        W = random_unitary(rng, n)
        B = W @ A @ W.conj().T
        B = 0.5 * (B + B.conj().T)
        np.testing.assert_allclose(mk.hermitian_eigen(A).eigenvalues,
                                   mk.hermitian_eigen(B).eigenvalues, atol=1e-10)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        mk.hermitian_eigen([[1, 2], [0, 1]])
    with pytest.raises(NonSquare):
        mk.hermitian_eigen(np.ones((2, 3)))


def test_eigen_tolerance_is_enforced(rng):
    with pytest.raises(ConvergenceFailure):
        mk.hermitian_eigen(random_hermitian(rng, 5), eig_tol=1e-30)


# ---------------------------------------------------------------- determinant, minors


def test_determinant_small_cases(rng):
    assert mk.determinant([[2 + 1j]]) == 2 + 1j
    assert mk.determinant(np.eye(4)) == pytest.approx(1.0)
    with pytest.raises(NonSquare):
        mk.determinant(np.ones((2, 3)))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_determinant_vs_cofactor_expansion(rng, n):
    A = rand_c(rng, (n, n))
    d = mk.determinant(A)
    ref = laplace_det(A)
    assert abs(d - ref) <= 1e-12 * max(1.0, abs(ref))
    assert abs(ref - leibniz_det(A)) <= 1e-12 * max(1.0, abs(ref))


def test_minor_examples(rng):
    A = rand_c(rng, (4, 4))
    assert mk.minor(A, range(4), range(4)) == pytest.approx(mk.determinant(A), rel=1e-14)
    assert mk.minor(np.eye(3), [0, 1], [0, 1]) == 1
    # rows {1,3}, cols {2,4} in 1-based numbering
    direct = A[0, 1] * A[2, 3] - A[0, 3] * A[2, 1]
    assert abs(mk.minor(A, [0, 2], [1, 3]) - direct) <= 1e-14
    assert mk.minor(A, [], []) == 1


def test_minor_errors():
    A = np.eye(3)
    with pytest.raises(IndexOutOfRange):
        mk.minor(A, [0, 3], [0, 1])
    with pytest.raises(DuplicateIndex):
        mk.minor(A, [1, 1], [0, 1])
    with pytest.raises(IndexError):
        mk.cofactor(A, 3, 0)


def test_cofactor_examples(rng):
    assert mk.cofactor(np.eye(2), 0, 1) == 0
    assert mk.cofactor(np.eye(2), 0, 0) == 1
    A = rand_c(rng, (4, 4))
    expansion = sum(A[0, j] * mk.cofactor(A, 0, j) for j in range(4))
    d = mk.determinant(A)
    assert abs(expansion - d) <= 1e-12 * abs(d)
    # adjugate identity: A adj(A) = det(A) 1
    adj = np.array([[mk.cofactor(A, j, i) for j in range(4)] for i in range(4)])
    assert mk.fro(A @ adj - d * np.eye(4)) <= 1e-12 * abs(d) * 4


def test_permutation_sign():
    assert mk.permutation_sign([0, 1, 2]) == 1
    assert mk.permutation_sign([1, 0, 2]) == -1
    assert mk.permutation_sign([1, 2, 0]) == 1
    for perm in itertools.permutations(range(4)):
        P = np.eye(4)[list(perm)]
        assert mk.permutation_sign(perm) == round(np.linalg.det(P))


# ---------------------------------------------------------------- Jacobi


def test_jacobi_identity_matrix():
    for perm in itertools.permutations(range(3)):
        for p in range(4):
            assert mk.jacobi_minor_residual(np.eye(3), perm, p) <= 1e-14


def test_jacobi_hand_example():
    X = np.diag([2.0, 3.0])
    Y = np.linalg.inv(X).T
    assert mk.minor(Y, [0], [0]) == pytest.approx(0.5)
    assert mk.minor(X, [1], [1]) / mk.determinant(X) == pytest.approx(0.5)
    assert mk.jacobi_minor_residual(X, [0, 1], 1) == 0.0


def test_jacobi_random_5x5(rng):
    X = rand_c(rng, (5, 5))
    perm = rng.permutation(5)
    for p in range(6):
        assert mk.jacobi_minor_residual(X, perm, p) <= 1e-10 * mk.fro(X) ** 5


def test_jacobi_many_permutations(rng):
    for n in range(1, 7):
        while True:
            X = rand_c(rng, (n, n))
            if np.linalg.cond(X) <= 1e6:
                break
        for _ in range(50):
            perm, rows = rng.permutation(n), rng.permutation(n)
            for p in range(n + 1):
                assert mk.jacobi_minor_residual(X, perm, p, rows=rows) <= 1e-9


def test_jacobi_singular():
    with pytest.raises(SingularMatrix):
        mk.jacobi_minor_residual(np.ones((3, 3)), [0, 1, 2], 1)


# ---------------------------------------------------------------- Cauchy


def test_cauchy_small():
    a, b = 0.3 + 0.2j, -0.7j
    assert mk.cauchy_determinant([a], [b]) == pytest.approx(1 / (1 + a - b))
    assert abs(mk.cauchy_determinant([0.1, 0.5], [0.2, 0.2])) == 0.0


def test_cauchy_random_n4(rng):
    xi, eta = rand_c(rng, 4), rand_c(rng, 4)
    closed = mk.cauchy_determinant(xi, eta)
    dense = mk.determinant(mk.cauchy_matrix(xi, eta))
    assert abs(closed - dense) <= 1e-11 * abs(dense)


def test_cauchy_200_instances(rng):
    for t in range(200):
        n = t % 6 + 1
        xi, eta = rand_c(rng, n), rand_c(rng, n)
        closed = mk.cauchy_determinant(xi, eta)
        dense = leibniz_det(mk.cauchy_matrix(xi, eta)) if n <= 4 else mk.determinant(mk.cauchy_matrix(xi, eta))
        assert abs(closed - dense) <= 1e-10 * max(abs(dense), 1e-300) + 1e-14


def test_cauchy_singular_denominator():
    with pytest.raises(SingularDenominator):
        mk.cauchy_determinant([0.0, 1.0], [1.0, 0.0])


# ---------------------------------------------------------------- rank updates


def test_rank_one_examples(rng):
    alpha = 0.4 - 1.1j
    assert mk.rank_one_update_det(np.eye(2), alpha, 0, 1) == pytest.approx(1.0)
    assert mk.rank_one_update_det(np.eye(2), alpha, 0, 0) == pytest.approx(1 + alpha)
    X = rand_c(rng, (4, 4))
    for a, b in itertools.product(range(4), repeat=2):
        E = np.zeros((4, 4), complex)
        E[a, b] = alpha
        ref = laplace_det(X + E)
        assert abs(mk.rank_one_update_det(X, alpha, a, b) - ref) <= 1e-12 * abs(ref)


def test_rank_two_examples(rng):
    assert mk.rank_two_hermitian_update_det(np.eye(2), 1.0, 0, 1) == pytest.approx(0.0, abs=1e-15)
    assert mk.determinant([[1, 1], [1, 1]]) == 0
    H = random_hermitian(rng, 5)
    assert mk.rank_two_hermitian_update_det(H, 0.0, 1, 3) == pytest.approx(mk.determinant(H), rel=1e-14)
    alpha = complex(*rng.standard_normal(2))
    a, b = 1, 4
    E = np.zeros((5, 5), complex)
    E[a, b], E[b, a] = alpha, np.conj(alpha)
    ref = laplace_det(H + E)
    assert abs(mk.rank_two_hermitian_update_det(H, alpha, a, b) - ref) <= 1e-11 * abs(ref)


def test_rank_two_errors(rng):
    H = random_hermitian(rng, 3)
    with pytest.raises(EqualIndices):
        mk.rank_two_hermitian_update_det(H, 1.0, 1, 1)
    with pytest.raises(NotHermitian):
        mk.rank_two_hermitian_update_det(rand_c(rng, (3, 3)), 1.0, 0, 1)
    with pytest.raises(SingularMatrix):
        mk.rank_two_hermitian_update_det(np.zeros((3, 3)), 1.0, 0, 1)


def test_low_rank_update(rng):
    for n in range(1, 6):
        for k in (1, 2):
            X, V, W = rand_c(rng, (n, n)), rand_c(rng, (n, k)), rand_c(rng, (n, k))
            ref = laplace_det(X + V @ W.conj().T)
            assert abs(mk.low_rank_update_det(X, V, W) - ref) <= 1e-10 * max(1.0, abs(ref))


# ---------------------------------------------------------------- graded eigenvalues


def test_jacobi_svd_matches_lapack(rng):
    G = rand_c(rng, (5, 5))
    np.testing.assert_allclose(mk.jacobi_singular_values(G), np.linalg.svd(G, compute_uv=False),
                               rtol=1e-13)


def test_graded_eigenvalues_keep_relative_accuracy():
    # K = 1 + small coupling, D spans e^{+-60}; all eigenvalues ~ d_k^2 to leading order
    K = np.array([[2.0, 0.5, 0.1], [0.5, 1.0, 0.2], [0.1, 0.2, 0.5]])
    log_d = np.array([60.0, 0.0, -60.0])
    logs = mk.graded_log_eigenvalues(K, log_d)
    # product of eigenvalues is det(K) exactly
    assert logs.sum() == pytest.approx(np.log(np.linalg.det(K)), abs=1e-12)
    # the smallest eigenvalue is the reciprocal of the (3,3) entry of K^-1, times d_3^2
    assert logs[-1] == pytest.approx(-120.0 - np.log(np.linalg.inv(K)[2, 2]), abs=1e-10)
    assert logs[0] == pytest.approx(120.0 + np.log(K[0, 0]), abs=1e-10)


def test_graded_overflow_guard():
    with pytest.raises(OverflowError):
        mk.graded_log_eigenvalues(np.eye(2), [800.0, -800.0])


# ---------------------------------------------------------------- suites and properties


def test_identity_suites_report():
    rep = mk.identity_suites(seed=3, trials=60)
    assert rep["passed"]
    assert set(rep["suites"]) == {"jacobi_minor", "cauchy_determinant", "rank_one_update",
                                  "rank_two_hermitian_update", "low_rank_update"}
    assert all(s["instances"] == 60 for s in rep["suites"].values())
    assert rep == mk.identity_suites(seed=3, trials=60)


def test_identity_suites_size_one():
    rep = mk.identity_suites(seed=1, sizes=[1], trials=20)
    assert rep["passed"]


complex_entries = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(complex_entries, min_size=n * n, max_size=n * n)))
def test_property_determinant_transpose_invariant(entries):
    n = int(round(np.sqrt(len(entries))))
    A = np.array(entries, complex).reshape(n, n)
    d = mk.determinant(A)
    assert abs(d - mk.determinant(A.T)) <= 1e-9 * max(1.0, np.prod(np.linalg.norm(A, axis=1)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_property_cauchy_closed_form(n, seed):
    rng = np.random.default_rng(seed)
    xi, eta = rand_c(rng, n), rand_c(rng, n)
    denom = 1 + xi[:, None] - eta[None, :]
    if np.abs(denom).min() < 1e-3:
        return
    closed = mk.cauchy_determinant(xi, eta)
    dense = mk.determinant(mk.cauchy_matrix(xi, eta))
    scale = np.prod(np.linalg.norm(mk.cauchy_matrix(xi, eta), axis=1))
    assert abs(closed - dense) <= 1e-10 * scale


def test_is_singular_is_scale_free():
    A = np.array([[1.0, 2.0], [2.0, 4.0 + 1e-15]])
    assert mk.is_singular(A)
    assert mk.is_singular(1e20 * A)
    assert not mk.is_singular(1e-20 * np.eye(3))
    assert mk.is_singular(np.zeros((2, 2)))
