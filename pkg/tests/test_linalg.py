import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinnlab.linalg import (RidgeProblem, qr_decompose, ridge_solve,
                            solve_upper, stationarity_residual)


def normal_equations_oracle(a, y, alpha):
    """Direct Gaussian elimination on (A^T A + alpha I) w = A^T y."""
    n = a.shape[1]
    lhs = a.T @ a + alpha * np.eye(n)
    rhs = a.T @ y
    aug = np.hstack([lhs, rhs[:, None]])
    for k in range(n):
        piv = k + int(np.argmax(np.abs(aug[k:, k])))
        aug[[k, piv]] = aug[[piv, k]]
        aug[k + 1:] -= np.outer(aug[k + 1:, k] / aug[k, k], aug[k])
    w = np.zeros(n)
    for i in range(n - 1, -1, -1):
        w[i] = (aug[i, -1] - aug[i, i + 1:n] @ w[i + 1:]) / aug[i, i]
    return w


def test_qr_reconstructs_and_q_is_orthonormal(rng):
    a = rng.normal(size=(12, 5))
    res = qr_decompose(a)
    np.testing.assert_allclose(res.q @ res.r, a, atol=1e-12)
    np.testing.assert_allclose(res.q.T @ res.q, np.eye(5), atol=1e-12)
    assert res.rank == 5 and not res.rank_deficient


def test_qr_flags_rank_deficiency(rng):
    a = rng.normal(size=(10, 4))
    a[:, 3] = a[:, 0] + a[:, 1]
    res = qr_decompose(a)
    assert res.rank_deficient and res.rank == 3


def test_qr_rejects_wide_matrices(rng):
    with pytest.raises(ValueError):
        qr_decompose(rng.normal(size=(3, 5)))


def test_solve_upper_roundtrip(rng):
    r = np.triu(rng.normal(size=(6, 6))) + 5.0 * np.eye(6)
    x = rng.normal(size=6)
    np.testing.assert_allclose(solve_upper(r, r @ x), x, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 1e-4, 1.0])
def test_ridge_matches_normal_equations_oracle(rng, alpha):
    for trial in range(20):
        m, n = 30 + trial, 3 + trial % 8
        a = rng.normal(size=(m, n))
        y = rng.normal(size=m)
        sol = ridge_solve(RidgeProblem(a, y, alpha))
        oracle = normal_equations_oracle(a, y, alpha)
        assert np.max(np.abs(sol.coeffs - oracle)) < 1e-8
        assert stationarity_residual(RidgeProblem(a, y, alpha),
                                     sol.coeffs) < 1e-8


def test_ridge_min_norm_fallback_on_singular_design(rng):
    a = rng.normal(size=(10, 4))
    a[:, 3] = 2.0 * a[:, 1]
    y = rng.normal(size=10)
    sol = ridge_solve(RidgeProblem(a, y, 0.0))
    assert sol.min_norm_fallback and sol.rank_deficient and sol.rank == 3
    # solution solves the LS problem: gradient orthogonal to the column space
    g = a.T @ (a @ sol.coeffs - y)
    assert np.max(np.abs(g)) < 1e-8
    # and is the minimum-norm minimizer: adding any null-space component grows it
    null = np.array([0.0, 2.0, 0.0, -1.0]) / np.sqrt(5.0)
    assert abs(np.dot(sol.coeffs, null)) < 1e-8


def test_ridge_underdetermined_uses_min_norm(rng):
    a = rng.normal(size=(3, 7))
    y = rng.normal(size=3)
    sol = ridge_solve(RidgeProblem(a, y, 0.0))
    assert sol.min_norm_fallback
    np.testing.assert_allclose(a @ sol.coeffs, y, atol=1e-9)


def test_ridge_problem_validation(rng):
    a = rng.normal(size=(5, 3))
    with pytest.raises(ValueError):
        RidgeProblem(a, np.zeros(4), 0.0)
    with pytest.raises(ValueError):
        RidgeProblem(a, np.zeros(5), -1.0)
    bad = a.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        RidgeProblem(bad, np.zeros(5), 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_ridge_stationarity_property(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n + 5, n))
    y = rng.normal(size=n + 5)
    prob = RidgeProblem(a, y, 1e-3)
    sol = ridge_solve(prob)
    assert stationarity_residual(prob, sol.coeffs) < 1e-8


def test_repeated_solves_are_bit_identical(rng):
    a = rng.normal(size=(40, 9))
    y = rng.normal(size=40)
    w1 = ridge_solve(RidgeProblem(a, y, 1e-4)).coeffs
    w2 = ridge_solve(RidgeProblem(a.copy(), y.copy(), 1e-4)).coeffs
    assert np.array_equal(w1, w2)
