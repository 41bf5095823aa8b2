"""Dense complex linear algebra: eigensolvers, minors, cofactors and the
determinant identities used as oracles throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. All index
arguments are 0-based.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    ConvergenceFailure,
    DuplicateIndex,
    EqualIndices,
    IndexOutOfRange,
    NonSquare,
    NotHermitian,
    SingularDenominator,
    SingularMatrix,
)

#: uniform singularity threshold, relative to the natural scale of the input
SINGULAR_TOL = 1e-12

__all__ = [
    "SINGULAR_TOL",
    "HermitianEigen",
    "as_matrix",
    "fro",
    "is_hermitian",
    "is_unitary",
    "is_positive_definite",
    "is_singular",
    "hermitian_eigen",
    "determinant",
    "minor",
    "cofactor",
    "permutation_sign",
    "jacobi_minor_residual",
    "cauchy_matrix",
    "cauchy_determinant",
    "rank_one_update_det",
    "rank_two_hermitian_update_det",
    "low_rank_update_det",
    "jacobi_singular_values",
    "graded_log_eigenvalues",
    "identity_suites",
]


class HermitianEigen(NamedTuple):
    """Eigenvalues sorted descending and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise NonSquare(f"expected a non-empty 2-d array, got shape {A.shape}")
    return A


def _square(A) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise NonSquare(f"matrix is {A.shape[0]}x{A.shape[1]}")
    return A


def fro(A) -> float:
    return float(np.linalg.norm(A))


def is_hermitian(A, tol: float = 1e-12) -> bool:
    A = as_matrix(A)
    return A.shape[0] == A.shape[1] and fro(A - A.conj().T) <= tol


def is_unitary(A, tol: float = 1e-12) -> bool:
    A = as_matrix(A)
    n = A.shape[0]
    return A.shape[1] == n and fro(A.conj().T @ A - np.eye(n)) <= tol


def is_positive_definite(A, tol: float = 1e-12) -> bool:
    """Hermitian with smallest eigenvalue above ``tol`` times the largest."""
    if not is_hermitian(A, tol * max(1.0, fro(A))):
        return False
    w = np.linalg.eigvalsh(as_matrix(A))
    return bool(w[0] > tol * max(1.0, abs(w[-1])))


def is_singular(A, tol: float = SINGULAR_TOL) -> bool:
    """Smallest singular value at most ``tol`` times the largest (scale free)."""
    sv = np.linalg.svd(_square(A), compute_uv=False)
    return bool(sv[-1] <= tol * sv[0])


def hermitian_eigen(A, eig_tol: float = 1e-10) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Residuals ``|A v_k - w_k v_k|`` and the orthonormality defect are checked
    against ``eig_tol`` (the former relative to ``|A|_F``); a violation is
    reported as :class:`ConvergenceFailure`.
    """
    A = _square(A)
    scale = fro(A)
    if fro(A - A.conj().T) > SINGULAR_TOL * max(scale, 1e-300):
        raise NotHermitian("input deviates from its conjugate transpose")
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    resid = np.linalg.norm(A @ V - V * w, axis=0)
    if np.any(resid > eig_tol * max(scale, 1.0)):
        raise ConvergenceFailure(f"eigen residual {resid.max():.3e} above tolerance")
    if fro(V.conj().T @ V - np.eye(A.shape[0])) > eig_tol:
        raise ConvergenceFailure("eigenvectors not orthonormal to tolerance")
    return HermitianEigen(w, V)


def determinant(A) -> complex:
    """Determinant by partially pivoted LU; closed forms for sizes 1 and 2."""
    A = _square(A)
    n = A.shape[0]
    if n == 1:
        return complex(A[0, 0])
    if n == 2:
        return complex(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    return complex(np.linalg.det(A))


def _check_indices(idx: Sequence[int], size: int, what: str) -> list[int]:
    idx = [int(i) for i in idx]
    for i in idx:
        if not 0 <= i < size:
            raise IndexOutOfRange(f"{what} index {i} outside 0..{size - 1}")
    if len(set(idx)) != len(idx):
        raise DuplicateIndex(f"repeated {what} index in {idx}")
    return idx


def minor(A, rows: Sequence[int], cols: Sequence[int]) -> complex:
    """Determinant of the submatrix on ``rows`` x ``cols``, taken in the listed order.

    An empty selection has determinant 1.
    """
    A = _square(A)
    n = A.shape[0]
    rows = _check_indices(rows, n, "row")
    cols = _check_indices(cols, n, "column")
    if len(rows) != len(cols):
        raise IndexOutOfRange("row and column selections differ in length")
    if not rows:
        return 1.0 + 0j
    return determinant(A[np.ix_(rows, cols)])


def cofactor(A, i: int, j: int) -> complex:
    A = _square(A)
    n = A.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"({i}, {j}) outside a {n}x{n} matrix")
    rows = [k for k in range(n) if k != i]
    cols = [k for k in range(n) if k != j]
    return (-1) ** (i + j) * minor(A, rows, cols)


def permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def jacobi_minor_residual(
    X, perm: Sequence[int], p: int, rows: Sequence[int] | None = None
) -> float:
    """Absolute defect of Jacobi's identity between minors of ``X`` and ``(X^-1)^T``.

    The arrangement ``rows = (k_1..k_n)`` (identity by default) is paired
    with ``perm = (l_1..l_n)``; the first ``p`` pairs select a minor of
    ``Y = (X^-1)^T``, the remaining pairs the complementary minor of ``X``.
    """
    X = _square(X)
    n = X.shape[0]
    ks = list(range(n)) if rows is None else _check_indices(rows, n, "row")
    ls = _check_indices(perm, n, "column")
    if len(ks) != n or len(ls) != n:
        raise IndexOutOfRange("arrangements must list every index once")
    if not 0 <= p <= n:
        raise IndexOutOfRange(f"split point {p} outside 0..{n}")
    det = determinant(X)
    if abs(det) <= SINGULAR_TOL * max(1.0, fro(X)) ** n:
        raise SingularMatrix("X is numerically singular")
    Y = np.linalg.inv(X).T
    # sigma sends k_i to l_i
    sigma = [0] * n
    for k, l in zip(ks, ls):
        sigma[k] = l
    lhs = minor(Y, ks[:p], ls[:p])
    rhs = permutation_sign(sigma) / det * minor(X, ks[p:], ls[p:])
    return float(abs(lhs - rhs))


def cauchy_matrix(xi, eta) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.complex128)
    eta = np.asarray(eta, dtype=np.complex128)
    return 1.0 / (1.0 + xi[:, None] - eta[None, :])


def cauchy_determinant(xi, eta) -> complex:
    """Closed-form determinant of the matrix ``1 / (1 + xi_k - eta_l)``."""
    xi = np.asarray(xi, dtype=np.complex128).ravel()
    eta = np.asarray(eta, dtype=np.complex128).ravel()
    if xi.shape != eta.shape:
        raise IndexOutOfRange("xi and eta must have equal length")
    denom = 1.0 + xi[:, None] - eta[None, :]
    if np.any(np.abs(denom) <= SINGULAR_TOL):
        raise SingularDenominator("some 1 + xi_k - eta_l vanishes")
    num = 1.0 + 0j
    n = xi.size
    for k in range(n):
        for l in range(k + 1, n):
            num *= (xi[k] - xi[l]) * (eta[l] - eta[k])
    return complex(num / np.prod(denom))


def rank_one_update_det(X, alpha: complex, a: int, b: int) -> complex:
    """``det(X + alpha e_ab)`` through the cofactor of entry ``(a, b)``."""
    X = _square(X)
    n = X.shape[0]
    if not (0 <= a < n and 0 <= b < n):
        raise IndexOutOfRange(f"({a}, {b}) outside a {n}x{n} matrix")
    if n == 1:
        return complex(X[0, 0] + alpha)
    return determinant(X) + alpha * cofactor(X, a, b)


def rank_two_hermitian_update_det(X, alpha: complex, a: int, b: int) -> complex:
    """``det(X + alpha e_ab + conj(alpha) e_ba)`` for invertible Hermitian ``X``."""
    X = _square(X)
    n = X.shape[0]
    if not (0 <= a < n and 0 <= b < n):
        raise IndexOutOfRange(f"({a}, {b}) outside a {n}x{n} matrix")
    if a == b:
        raise EqualIndices("the Hermitian rank-two update needs a != b")
    scale = max(1.0, fro(X))
    if fro(X - X.conj().T) > SINGULAR_TOL * scale:
        raise NotHermitian("X is not Hermitian")
    det = determinant(X)
    if abs(det) <= SINGULAR_TOL * scale**n:
        raise SingularMatrix("X is numerically singular")
    c_ab = cofactor(X, a, b)
    c_aa = cofactor(X, a, a)
    c_bb = cofactor(X, b, b)
    return (
        det
        + alpha * c_ab
        + np.conj(alpha) * np.conj(c_ab)
        + abs(alpha) ** 2 * (abs(c_ab) ** 2 - c_aa * c_bb) / det
    )


def low_rank_update_det(X, V, W) -> complex:
    """``det(X + V W^*)`` as ``det(X) det(1_k + W^* X^-1 V)``."""
    X = _square(X)
    V = np.atleast_2d(np.asarray(V, dtype=np.complex128))
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    if V.shape != W.shape or V.shape[0] != X.shape[0]:
        raise IndexOutOfRange("V and W must both be n x k")
    det = determinant(X)
    if abs(det) <= SINGULAR_TOL * max(1.0, fro(X)) ** X.shape[0]:
        raise SingularMatrix("X is numerically singular")
    k = V.shape[1]
    core = np.eye(k) + W.conj().T @ np.linalg.solve(X, V)
    return det * determinant(core)


def _robust_norm(v: np.ndarray) -> float:
    m = np.max(np.abs(v))
    if m == 0.0:
        return 0.0
    return float(m * np.linalg.norm(v / m))


def jacobi_singular_values(G, tol: float = 1e-15, max_sweeps: int = 80) -> np.ndarray:
    """Singular values of ``G`` by one-sided (Hestenes) Jacobi orthogonalisation.

    Unlike bidiagonalisation this keeps high relative accuracy when ``G`` is a
    well-conditioned matrix with strongly graded column scales, which is the
    situation for exponential matrix flows at large times. Returned in
    descending order.
    """
    G = as_matrix(G).copy()
    m = G.shape[1]
    norms = np.array([_robust_norm(G[:, j]) for j in range(m)])
    for _ in range(max_sweeps):
        rotated = False
        for i, j in itertools.combinations(range(m), 2):
            if norms[i] == 0.0 or norms[j] == 0.0:
                continue
            ui = G[:, i] / norms[i]
            uj = G[:, j] / norms[j]
            c = np.vdot(ui, uj)
            ac = abs(c)
            if ac <= tol:
                continue
            rotated = True
            phase = c / ac
            r = norms[j] / norms[i]
            zeta = (r - 1.0 / r) / (2.0 * ac)
            t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
            cs = 1.0 / np.hypot(1.0, t)
            sn = cs * t
            gi = G[:, i].copy()
            gj = G[:, j] * np.conj(phase)
            G[:, i] = cs * gi - sn * gj
            G[:, j] = sn * gi + cs * gj
            norms[i] = _robust_norm(G[:, i])
            norms[j] = _robust_norm(G[:, j])
        if not rotated:
            return np.sort(norms)[::-1]
    raise ConvergenceFailure("one-sided Jacobi did not converge")


def graded_log_eigenvalues(K, log_d) -> np.ndarray:
    """Logarithms of the eigenvalues of ``D K D`` with ``D = diag(exp(log_d))``.

    ``K`` must be Hermitian positive definite. With ``K = R^* R`` the
    eigenvalues are the squared singular values of ``R D``, which Jacobi
    delivers to relative accuracy governed by the conditioning of ``K`` alone,
    however wide the spread of ``D``. Returned in descending order.
    """
    K = _square(K)
    log_d = np.asarray(log_d, dtype=float)
    if np.max(np.abs(log_d)) > 700.0:
        raise OverflowError("diagonal scaling exceeds double range")
    try:
        R = np.linalg.cholesky(K).conj().T
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("K is not positive definite") from exc
    sv = jacobi_singular_values(R * np.exp(log_d)[None, :])
    return 2.0 * np.log(sv)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _well_conditioned(rng: np.random.Generator, n: int, max_cond: float = 1e6) -> np.ndarray:
    while True:
        X = _random_complex(rng, (n, n))
        if np.linalg.cond(X) <= max_cond:
            return X


def identity_suites(seed: int = 0, sizes: Sequence[int] = (1, 2, 3, 4, 5, 6), trials: int = 200,
                    tol: float = 1e-9) -> dict:
    """Randomised checks of the determinant identities against dense evaluation.

    Each suite draws ``trials`` instances with sizes cycling through
    ``sizes`` and records the worst relative residual. Deterministic for a
    fixed ``seed``.
    """
    rng = np.random.default_rng(seed)
    sizes = [int(s) for s in sizes]
    worst = {"jacobi_minor": 0.0, "cauchy_determinant": 0.0, "rank_one_update": 0.0,
             "rank_two_hermitian_update": 0.0, "low_rank_update": 0.0}
    counts = dict.fromkeys(worst, 0)

    for t in range(trials):
        n = sizes[t % len(sizes)]

        X = _well_conditioned(rng, n)
        perm = rng.permutation(n)
        rows = rng.permutation(n)
        Y = np.linalg.inv(X).T
        for p in range(n + 1):
            scale = max(1.0, abs(minor(Y, rows[:p], perm[:p])))
            r = jacobi_minor_residual(X, perm, p, rows=rows) / scale
            worst["jacobi_minor"] = max(worst["jacobi_minor"], r)
        counts["jacobi_minor"] += 1

        xi = _random_complex(rng, n)
        eta = _random_complex(rng, n)
        closed = cauchy_determinant(xi, eta)
        dense = determinant(cauchy_matrix(xi, eta))
        worst["cauchy_determinant"] = max(worst["cauchy_determinant"], _rel(closed, dense))
        counts["cauchy_determinant"] += 1

        X = _random_complex(rng, (n, n))
        alpha = complex(*rng.standard_normal(2))
        a, b = (int(v) for v in rng.integers(0, n, 2))
        E = np.zeros((n, n), complex)
        E[a, b] = alpha
        r = _rel(rank_one_update_det(X, alpha, a, b), determinant(X + E))
        worst["rank_one_update"] = max(worst["rank_one_update"], r)
        counts["rank_one_update"] += 1

        # the Hermitian rank-two update needs two distinct indices
        m = max(n, 2)
        H = _random_complex(rng, (m, m))
        H = H + H.conj().T
        a, b = (int(v) for v in rng.choice(m, 2, replace=False))
        E = np.zeros((m, m), complex)
        E[a, b] = alpha
        E[b, a] = np.conj(alpha)
        r = _rel(rank_two_hermitian_update_det(H, alpha, a, b), determinant(H + E))
        worst["rank_two_hermitian_update"] = max(worst["rank_two_hermitian_update"], r)
        counts["rank_two_hermitian_update"] += 1

        k = int(rng.integers(1, 3))
        X = _well_conditioned(rng, n)
        V = _random_complex(rng, (n, k))
        W = _random_complex(rng, (n, k))
        r = _rel(low_rank_update_det(X, V, W), determinant(X + V @ W.conj().T))
        worst["low_rank_update"] = max(worst["low_rank_update"], r)
        counts["low_rank_update"] += 1

    suites = {
        name: {"instances": counts[name], "worst_residual": float(worst[name]),
               "passed": bool(worst[name] <= tol)}
        for name in worst
    }
    return {
        "seed": seed,
        "sizes": sizes,
        "tolerance": tol,
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }
