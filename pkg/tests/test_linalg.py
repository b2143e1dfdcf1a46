import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psg.linalg import (
    ConvergenceError,
    DimensionError,
    DuplicateIndexError,
    ProjectionState,
    best_rank_k_error,
    extend_basis,
    objective_g,
    project,
    state_from_columns,
)


def pinv_objective(A_S, y):
    # explicit normal-equations projector, independent of the MGS path
    P = A_S @ np.linalg.inv(A_S.T @ A_S) @ A_S.T
    p = P @ y
    return float(p @ p)


def jacobi_eigenvalues(S, sweeps=100, tol=1e-15):
    """Cyclic Jacobi rotations on a symmetric matrix; returns eigenvalues."""
    S = np.array(S, dtype=float)
    n = S.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(sum(S[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off < tol * max(1.0, abs(S).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(S[p, q]) < 1e-300:
                    continue
                theta = (S[q, q] - S[p, p]) / (2 * S[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                S = J.T @ S @ J
    return np.sort(np.diag(S))[::-1]


# ---- extend_basis ----


def test_first_vector_normalized():
    st0 = extend_basis(ProjectionState.empty(3), np.array([1.0, 0, 0]), 3)
    assert st0.selected == (3,)
    np.testing.assert_allclose(st0.basis[:, 0], [1, 0, 0])


def test_dependent_column_rejected():
    st0 = extend_basis(ProjectionState.empty(3), np.array([1.0, 0, 0]), 0)
    st1 = extend_basis(st0, np.array([2.0, 0, 0]), 1)
    assert st1.rank == 1
    assert st1.dependent_rejections == 1


def test_hand_gram_schmidt():
    st0 = extend_basis(ProjectionState.empty(3), np.array([1.0, 0, 0]), 0)
    st1 = extend_basis(st0, np.array([1.0, 1, 0]), 1)
    np.testing.assert_allclose(st1.basis[:, 1], [0, 1, 0], atol=1e-15)


def test_duplicate_index_raises():
    st0 = extend_basis(ProjectionState.empty(2), np.array([1.0, 0]), 0)
    with pytest.raises(DuplicateIndexError):
        extend_basis(st0, np.array([0.0, 1]), 0)


def test_wrong_length_raises():
    with pytest.raises(DimensionError):
        extend_basis(ProjectionState.empty(3), np.ones(2), 0)


def test_state_is_immutable():
    st0 = ProjectionState.empty(2)
    st1 = extend_basis(st0, np.array([1.0, 0]), 0)
    assert st0.rank == 0 and st1.rank == 1


# ---- project / objective ----


def test_project_empty():
    y = np.array([1.0, 2, 3])
    p, r = project(ProjectionState.empty(3), y)
    np.testing.assert_array_equal(p, 0)
    np.testing.assert_array_equal(r, y)


def test_project_full_rank():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((4, 4))
    v = rng.standard_normal(4)
    p, r = project(state_from_columns(A, range(4)), v)
    np.testing.assert_allclose(p, v, atol=1e-12)
    np.testing.assert_allclose(r, 0, atol=1e-12)


def test_project_axis():
    st0 = extend_basis(ProjectionState.empty(2), np.array([1.0, 0]), 0)
    p, r = project(st0, np.array([3.0, 4]))
    np.testing.assert_allclose(p, [3, 0])
    np.testing.assert_allclose(r, [0, 4])


def test_objective_trivial():
    y = np.array([1.0, -2, 0.5])
    assert objective_g(ProjectionState.empty(3), y) == 0
    assert objective_g(state_from_columns(np.eye(3), [0, 1, 2]), y) == pytest.approx(y @ y)


def test_objective_matches_pinv_4x6():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((4, 6))
    y = rng.standard_normal(4)
    S = [1, 4]
    assert objective_g(state_from_columns(A, S), y) == pytest.approx(pinv_objective(A[:, S], y), rel=1e-10)


# ---- properties ----

seeds = st.integers(0, 2**32 - 1)


def _random_state(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    s = int(rng.integers(0, min(n, 4) + 1))
    scale = 10.0 ** rng.uniform(-3, 3)
    A = scale * rng.standard_normal((n, s))
    v = scale * rng.standard_normal(n)
    state = state_from_columns(A, range(s)) if s else ProjectionState.empty(n)
    return state, v


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_idempotence_and_orthogonality(seed):
    state, v = _random_state(seed)
    p, r = project(state, v)
    p2, _ = project(state, p)
    scale = max(1.0, np.linalg.norm(v))
    assert np.max(np.abs(p2 - p)) <= 1e-8 * scale
    if state.rank:
        assert np.max(np.abs(state.basis.T @ r)) <= 1e-8 * scale


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_pythagoras(seed):
    state, v = _random_state(seed)
    p, r = project(state, v)
    assert abs(v @ v - p @ p - r @ r) <= 1e-8 * (v @ v)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_pinv_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 11))
    s = int(rng.integers(1, min(n, 4) + 1))
    A = rng.standard_normal((n, s))
    y = rng.standard_normal(n)
    assert objective_g(state_from_columns(A, range(s)), y) == pytest.approx(pinv_objective(A, y), rel=1e-8, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_objective_monotone_in_basis(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 9)), int(rng.integers(2, 9))
    A = rng.standard_normal((n, m))
    y = rng.standard_normal(n)
    state, prev = ProjectionState.empty(n), 0.0
    for j in rng.permutation(m):
        state = extend_basis(state, A[:, j], int(j))
        g = objective_g(state, y)
        assert g >= prev - 1e-12 * (y @ y)
        prev = g


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_basis_orthonormal(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 30))
    s = int(rng.integers(1, n + 1))
    # columns with a wide spread of norms and some near-collinearity
    A = rng.standard_normal((n, s)) * 10.0 ** rng.uniform(-4, 4, size=s)
    if s > 1:
        A[:, -1] = A[:, 0] + 1e-6 * np.linalg.norm(A[:, 0]) * rng.standard_normal(n)
    Q = state_from_columns(A, range(s)).basis
    np.testing.assert_allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-10)


# ---- best_rank_k_error ----


def test_rank_one_error_zero():
    D = np.outer([1.0, 2, 3], [4.0, -1, 2, 0.5])
    assert best_rank_k_error(D, 1) == pytest.approx(0, abs=1e-10)


def test_identity_rank2():
    assert best_rank_k_error(np.eye(3), 2) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_jacobi_oracle(seed):
    D = np.random.default_rng(seed).standard_normal((5, 5))
    ev = jacobi_eigenvalues(D.T @ D)
    assert best_rank_k_error(D, 2) == pytest.approx(ev[2:].sum(), rel=1e-6, abs=1e-9)


def test_wide_and_tall():
    rng = np.random.default_rng(3)
    for shape in [(6, 30), (30, 6)]:
        D = rng.standard_normal(shape)
        s = np.linalg.svd(D, compute_uv=False)
        assert best_rank_k_error(D, 3) == pytest.approx(np.sum(s[3:] ** 2), rel=1e-6)


def test_invalid_k():
    with pytest.raises(ValueError):
        best_rank_k_error(np.eye(3), 0)
    with pytest.raises(ValueError):
        best_rank_k_error(np.eye(3), 4)


def test_iteration_cap_raises():
    # a Gaussian 40x40 cannot settle to 1e-10 in a single sweep
    D = np.random.default_rng(0).standard_normal((40, 40))
    with pytest.raises(ConvergenceError):
        best_rank_k_error(D, 5, max_iter=1)
