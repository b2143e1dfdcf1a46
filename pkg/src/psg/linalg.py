"""Incremental orthonormal bases, projections and the set objective g(S)."""

from dataclasses import dataclass, field

import numpy as np

from psg.rng import make_rng

# A column is rejected as dependent when its component orthogonal to the
# current basis has norm <= DEPENDENCE_TOL * (its original norm).
DEPENDENCE_TOL = 1e-10


class DimensionError(ValueError):
    pass


class DuplicateIndexError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def as_matrix(D, name="matrix"):
    """Validate and return ``D`` as a finite, non-empty float64 2-D array."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] == 0 or D.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return D


def as_vector(v, n, name="vector"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionError(f"{name} must have length {n}, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class ProjectionState:
    """Orthonormal basis for span(A_S), grown one column at a time.

    ``basis`` is an ``(ambient_dim, rank)`` array with orthonormal columns.
    ``selected`` lists every index passed to :func:`extend_basis`, including
    ones whose column turned out to be dependent (those leave the basis
    untouched and bump ``dependent_rejections``).
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)
    selected: tuple = ()
    dependent_rejections: int = 0

    @classmethod
    def empty(cls, ambient_dim):
        if ambient_dim < 1:
            raise DimensionError("ambient_dim must be positive")
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @property
    def rank(self):
        return self.basis.shape[1]

    def extend(self, column, index):
        return extend_basis(self, column, index)

    def project(self, v):
        return project(self, v)


def extend_basis(state, column, index):
    """Return a new state with ``column`` (labelled ``index``) appended.

    Orthogonalizes with modified Gram-Schmidt followed by one full
    reorthogonalization pass against the whole basis.
    """
    column = as_vector(column, state.ambient_dim, "column")
    index = int(index)
    if index in state.selected:
        raise DuplicateIndexError(f"index {index} already selected")
    selected = state.selected + (index,)

    Q = state.basis
    norm0 = np.linalg.norm(column)
    v = column.copy()
    for j in range(Q.shape[1]):
        q = Q[:, j]
        v -= (q @ v) * q
    if Q.shape[1]:
        v -= Q @ (Q.T @ v)
    norm = np.linalg.norm(v)

    if norm0 == 0.0 or norm <= DEPENDENCE_TOL * norm0 or Q.shape[1] >= state.ambient_dim:
        return ProjectionState(state.ambient_dim, Q, selected, state.dependent_rejections + 1)
    basis = np.column_stack([Q, v / norm])
    return ProjectionState(state.ambient_dim, basis, selected, state.dependent_rejections)


def project(state, v):
    """Split ``v`` into its projection onto span(basis) and the residual."""
    v = as_vector(v, state.ambient_dim)
    Q = state.basis
    if Q.shape[1] == 0:
        return np.zeros_like(v), v.copy()
    proj = Q @ (Q.T @ v)
    return proj, v - proj


def objective_g(state, y):
    """g(S) = ||P(S) y||^2."""
    proj, _ = project(state, y)
    return float(proj @ proj)


def state_from_columns(A, indices):
    A = as_matrix(A)
    state = ProjectionState.empty(A.shape[0])
    for j in indices:
        state = extend_basis(state, A[:, j], j)
    return state


def best_rank_k_error(D, k, tol=1e-10, max_iter=10_000, seed=0):
    """||D - D_k||_F^2 for the best rank-``k`` approximation D_k.

    Orthogonal (subspace) iteration on the smaller Gram matrix with a
    Rayleigh-Ritz step per sweep and a few guard vectors beyond ``k``.
    Stops when the captured energy (sum of the top-k Ritz values) changes by
    less than ``tol * ||D||_F^2`` between sweeps.
    """
    D = as_matrix(D)
    n, m = D.shape
    k = int(k)
    if not 1 <= k <= min(n, m):
        raise ValueError(f"k must lie in [1, {min(n, m)}], got {k}")

    M = D.T @ D if m <= n else D @ D.T
    d = M.shape[0]
    total = float(np.trace(M))
    if k == d or total == 0.0:
        return 0.0

    block = min(d, k + max(4, k // 4))
    X, _ = np.linalg.qr(make_rng(seed).standard_normal((d, block)))
    prev = None
    for _ in range(max_iter):
        X, _ = np.linalg.qr(M @ X)
        T = X.T @ M @ X
        w, V = np.linalg.eigh((T + T.T) / 2)
        order = np.argsort(w)[::-1]
        w, X = w[order], X @ V[:, order]
        energy = float(np.sum(w[:k]))
        if prev is not None and abs(energy - prev) <= tol * total:
            return max(total - energy, 0.0)
        prev = energy
    raise ConvergenceError(f"subspace iteration did not converge in {max_iter} sweeps")
