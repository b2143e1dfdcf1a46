"""Greedy support selection: OMP, OLS, progressive stochastic greedy (PSG) and
OMP with a fixed-size random search set ("restricted").

An *oracle call* is one evaluation of the selection criterion for one
candidate index. Every method records how many it made.
"""

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from psg.linalg import (
    DEPENDENCE_TOL,
    ProjectionState,
    as_matrix,
    as_vector,
    extend_basis,
    project,
    state_from_columns,
)
from psg.rng import make_rng

METHODS = ("omp", "ols", "psg", "restricted")
EARLY_STOP_RTOL = 1e-10
BRUTE_FORCE_LIMIT = 10**6


class SearchExhausted(RuntimeError):
    """No eligible candidate remains in the search set."""


class EpsilonRangeWarning(UserWarning):
    pass


def epsilon_range(k, m):
    return math.exp(-k), math.exp(-k / m)


def clamp_epsilon(epsilon, k, m):
    """Clamp epsilon into [e^-k, e^(-k/m)], warning when it moves."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    lo, hi = epsilon_range(k, m)
    clamped = min(max(epsilon, lo), hi)
    if clamped != epsilon:
        warnings.warn(
            f"epsilon={epsilon:.6g} outside [{lo:.6g}, {hi:.6g}] for k={k}, m={m}; using {clamped:.6g}",
            EpsilonRangeWarning,
            stacklevel=3,
        )
    return clamped


def schedule_size(i, k, m, epsilon):
    """Search-set size r_i of PSG iteration ``i``.

    r_i = min(ceil(m/(k-i) * ln(1/eps)), m) while i < k - ln(1/eps), else m.
    """
    if not 0 <= i < k:
        raise ValueError(f"iteration {i} outside [0, {k})")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    log_inv = -math.log(epsilon)
    if i < k - log_inv:
        x = m / (k - i) * log_inv
        # shave float noise so an exact integer is not bumped up by ceil
        return max(1, min(int(math.ceil(x - 1e-12 * x)), m))
    return m


@dataclass(frozen=True)
class Schedule:
    m: int
    k: int
    epsilon: float
    per_iteration_sizes: tuple

    @classmethod
    def build(cls, m, k, epsilon):
        sizes = tuple(schedule_size(i, k, m, epsilon) for i in range(k))
        return cls(m, k, epsilon, sizes)

    @property
    def total(self):
        return sum(self.per_iteration_sizes)


def draw_search_set(m, r, replacement=False, rng=None):
    """Sample ``r`` indices uniformly from range(m).

    Without replacement: ``r`` distinct indices. With replacement: ``r``
    independent draws, returned deduplicated. Either way the result is sorted.
    """
    if r < 1 or (not replacement and r > m):
        raise ValueError(f"r must lie in [1, {m}] without replacement, got {r}")
    if not replacement and r == m:
        return np.arange(m)
    if rng is None:
        raise ValueError("an rng is required for a proper random draw")
    if replacement:
        return np.unique(rng.integers(0, m, size=r))
    return np.sort(rng.choice(m, size=r, replace=False))


def select_step(criterion, A, residual, state, search, col_norms=None):
    """Pick argmax over ``search`` minus already-selected indices.

    omp gain: |a_j . r| / ||a_j||
    ols gain: |a_j . r| / ||(I - P(S)) a_j||
    Ties go to the lowest index. Returns ``(index, gain)``.
    """
    if criterion not in ("omp", "ols"):
        raise ValueError(f"unknown criterion {criterion!r}")
    cand = np.sort(np.asarray(search, dtype=np.intp))
    if state.selected:
        cand = cand[~np.isin(cand, state.selected)]
    if cand.size == 0:
        raise SearchExhausted("search set holds only already-selected indices")

    Ac = A[:, cand]
    corr = np.abs(Ac.T @ residual)
    norms = np.linalg.norm(Ac, axis=0) if col_norms is None else col_norms[cand]
    if criterion == "omp":
        denom = norms
        valid = norms > 0
    else:
        Q = state.basis
        orth = Ac - Q @ (Q.T @ Ac) if Q.shape[1] else Ac
        denom = np.linalg.norm(orth, axis=0)
        valid = denom > DEPENDENCE_TOL * norms
    if not valid.any():
        raise SearchExhausted("every candidate lies in the current span")

    gains = np.full(cand.shape, -np.inf)
    gains[valid] = corr[valid] / denom[valid]
    pos = int(np.argmax(gains))
    return int(cand[pos]), float(gains[pos])


@dataclass(frozen=True)
class SelectionTrace:
    selected: tuple
    gains: tuple
    oracle_calls: int
    search_sets: tuple = field(repr=False)
    draw_sizes: tuple
    method: str
    seed: int | None = None
    objective: tuple = ()
    early_stopped: bool = False
    failed: bool = False
    redraws: int = 0
    epsilon: float | None = None
    r: int | None = None

    def matches(self, support):
        return set(self.selected) == set(support)


def run_selector(method, A, y, k, epsilon=None, r=None, replacement=False, seed=None):
    """Run ``k`` greedy iterations of ``method`` and return the trace.

    Search sets: omp/ols scan all of range(m); psg draws ``schedule_size``
    indices per iteration; restricted draws a fresh set of ``r`` indices per
    iteration. psg and restricted use the OMP criterion.

    ``oracle_calls`` is the sum of scheduled draw sizes, counting duplicates
    and already-selected indices. A draw with no eligible candidate is redrawn
    once (counted in ``redraws``, not in ``oracle_calls``); a second empty draw
    marks the trace ``failed`` and ends the run.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    A = as_matrix(A, "A")
    n, m = A.shape
    y = as_vector(y, n, "y")
    k = int(k)
    if not 1 <= k <= min(n, m):
        raise ValueError(f"k must lie in [1, min(n, m)] = [1, {min(n, m)}], got {k}")

    rng = None
    if method == "psg":
        if epsilon is None:
            raise ValueError("psg needs epsilon")
        epsilon = clamp_epsilon(float(epsilon), k, m)
        rng = make_rng(seed)
    elif method == "restricted":
        if r is None or not 1 <= int(r) <= m:
            raise ValueError(f"restricted needs 1 <= r <= m={m}, got {r}")
        r = int(r)
        rng = make_rng(seed)
    else:
        seed = None

    criterion = "ols" if method == "ols" else "omp"
    col_norms = np.linalg.norm(A, axis=0)
    y_norm2 = float(y @ y)
    stop_level = EARLY_STOP_RTOL * math.sqrt(y_norm2)

    state = ProjectionState.empty(n)
    residual = y.copy()
    gains, searches, sizes, objective = [], [], [], []
    redraws = 0
    early = failed = False

    for i in range(k):
        if method in ("omp", "ols"):
            size = m
        elif method == "psg":
            size = schedule_size(i, k, m, epsilon)
        else:
            size = r
        search = draw_search_set(m, size, replacement, rng)
        try:
            j, gain = select_step(criterion, A, residual, state, search, col_norms)
        except SearchExhausted:
            if rng is None:
                raise
            redraws += 1
            search = draw_search_set(m, size, replacement, rng)
            try:
                j, gain = select_step(criterion, A, residual, state, search, col_norms)
            except SearchExhausted:
                failed = True
                break
        sizes.append(size)
        searches.append(search)
        gains.append(gain)
        state = extend_basis(state, A[:, j], j)
        _, residual = project(state, y)
        res2 = float(residual @ residual)
        objective.append(y_norm2 - res2)
        if math.sqrt(res2) < stop_level and i + 1 < k:
            early = True
            break

    return SelectionTrace(
        selected=state.selected,
        gains=tuple(gains),
        oracle_calls=int(sum(sizes)),
        search_sets=tuple(searches),
        draw_sizes=tuple(sizes),
        method=method,
        seed=None if seed is None else int(seed),
        objective=tuple(objective),
        early_stopped=early,
        failed=failed,
        redraws=redraws,
        epsilon=epsilon if method == "psg" else None,
        r=r if method == "restricted" else None,
    )


def brute_force_support(A, y, k, limit=BRUTE_FORCE_LIMIT):
    """Exhaustive maximizer of g(S) over all size-``k`` subsets.

    Subsets are visited in lexicographic order and a later subset replaces
    the incumbent only if it beats it by more than 1e-12 * ||y||^2.
    """
    A = as_matrix(A, "A")
    n, m = A.shape
    y = as_vector(y, n, "y")
    k = int(k)
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    if math.comb(m, k) > limit:
        raise ValueError(f"C({m}, {k}) = {math.comb(m, k)} subsets exceeds the exhaustive limit {limit}")

    slack = 1e-12 * float(y @ y)
    best, best_g = None, -math.inf
    for subset in itertools.combinations(range(m), k):
        proj, _ = project(state_from_columns(A, subset), y)
        g = float(proj @ proj)
        if g > best_g + slack:
            best, best_g = subset, g
    return best
