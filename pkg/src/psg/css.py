"""Column subset selection: greedy, PSG-scheduled greedy and a random baseline."""

from dataclasses import dataclass

import numpy as np

from psg.greedy import clamp_epsilon, draw_search_set, schedule_size
from psg.linalg import ProjectionState, as_matrix, extend_basis, state_from_columns
from psg.rng import make_rng

CSS_METHODS = ("greedy", "psg", "random")
# column j is degenerate once ||(I - P(S)) d_j||^2 <= DEGENERATE_TOL * ||d_j||^2
DEGENERATE_TOL = 1e-10


@dataclass(frozen=True)
class CssTrace:
    selected: tuple
    errors_by_step: tuple
    oracle_calls: int
    method: str
    seed: int | None = None
    epsilon: float | None = None
    early_stopped: bool = False
    redraws: int = 0

    @property
    def error(self):
        return self.errors_by_step[-1] if self.errors_by_step else None


def recon_error(D, selected):
    """||D - P(S) D||_F^2 for S = ``selected``."""
    D = as_matrix(D, "D")
    selected = [int(j) for j in selected]
    if any(not 0 <= j < D.shape[1] for j in selected):
        raise ValueError("selected column index out of range")
    Q = state_from_columns(D, selected).basis
    R = D - Q @ (Q.T @ D) if Q.shape[1] else D
    return float(np.sum(R * R))


def run_css(method, D, k, epsilon=None, seed=None, replacement=False):
    """Select ``k`` columns of ``D``.

    greedy and psg maximize ||d_j^T E||^2 / ||(I - P(S)) d_j||^2 with
    E = (I - P(S)) D; greedy scans every column, psg scans a random set sized
    by the PSG schedule. random picks uniformly among unselected columns.

    The residual matrix R = E is kept up to date with one rank-1 update per
    step and its Gram matrix R^T R (whose rows give the numerators) with a
    matching rank-1 downdate, so a step costs O(n m + m^2).
    """
    if method not in CSS_METHODS:
        raise ValueError(f"method must be one of {CSS_METHODS}, got {method!r}")
    D = as_matrix(D, "D")
    n, m = D.shape
    k = int(k)
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    rng = None
    if method == "psg":
        if epsilon is None:
            raise ValueError("psg needs epsilon")
        epsilon = clamp_epsilon(float(epsilon), k, m)
    if method != "greedy":
        rng = make_rng(seed)
    else:
        seed = None

    R = D.copy()
    G = D.T @ D if method != "random" else None
    col2 = np.sum(D * D, axis=0)
    state = ProjectionState.empty(n)
    taken = np.zeros(m, dtype=bool)
    errors = []
    oracle_calls = redraws = 0
    early = False

    for i in range(k):
        res2 = np.sum(R * R, axis=0)
        eligible = (res2 > DEGENERATE_TOL * col2) & ~taken
        if not eligible.any():
            early = True
            break

        if method == "random":
            j = int(rng.choice(np.flatnonzero(eligible)))
        else:
            if method == "greedy":
                search = np.arange(m)
            else:
                size = schedule_size(i, k, m, epsilon)
                search = draw_search_set(m, size, replacement, rng)
                if not eligible[search].any():
                    redraws += 1
                    search = draw_search_set(m, size, replacement, rng)
                oracle_calls += size
            cand = search[eligible[search]]
            if method == "greedy":
                oracle_calls += m
            if cand.size == 0:
                early = True
                break
            numer = np.sum(G[cand] ** 2, axis=1)
            j = int(cand[np.argmax(numer / res2[cand])])

        taken[j] = True
        rank_before = state.rank
        state = extend_basis(state, D[:, j], j)
        if state.rank > rank_before:
            q = state.basis[:, -1]
            w = R.T @ q
            R -= np.outer(q, w)
            if G is not None:
                G -= np.outer(w, w)
        errors.append(float(np.sum(R * R)))

    return CssTrace(
        selected=state.selected,
        errors_by_step=tuple(errors),
        oracle_calls=int(oracle_calls),
        method=method,
        seed=None if seed is None else int(seed),
        epsilon=epsilon if method == "psg" else None,
        early_stopped=early,
        redraws=redraws,
    )
