"""Closed-form recovery-probability bounds, oracle counts and the
submodularity ratio of g(S).

All logarithms are natural.
"""

import itertools
import math
from dataclasses import asdict, dataclass

from psg.greedy import schedule_size
from psg.instances import sample_size_n
from psg.linalg import as_matrix, as_vector, project, state_from_columns

RATIO_SKIP = 1e-12
EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True)
class BoundParams:
    m: int
    n: int
    k: int
    epsilon: float = 0.01
    beta: float = 0.1
    gamma: float = 0.5
    delta: float = 0.1
    r: int | None = None
    alpha1: float = 0.5


@dataclass(frozen=True)
class PProductBound:
    tight: float
    simple: float
    preform: float


@dataclass(frozen=True)
class RestrictedUpper:
    value: float
    term_a: float
    term_b: float
    ell: int


@dataclass(frozen=True)
class OracleComplexity:
    exact: int
    harmonic: float


@dataclass(frozen=True)
class QTilde:
    q1: float
    q2: float
    vacuous: bool


@dataclass(frozen=True)
class ExpectationBound:
    factor: float
    eta: float | None
    s: float
    exhaustive: bool


def harmonic(n):
    return math.fsum(1.0 / i for i in range(1, int(n) + 1))


def p_product_lower_bound(k, epsilon):
    """Lower bounds on the chance that every PSG search set meets the
    remaining support.

    ``preform`` is (1-eps)^(k - ln(1/eps)) (exponent floored at 0),
    ``tight`` applies (1+a)^b >= e^(ab)(1 - a^2 b) to it, ``simple`` is 1 - k eps.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    log_inv = -math.log(epsilon)
    tight = math.exp(-epsilon * k + epsilon * log_inv) * (1 - epsilon**2 * k + epsilon**2 * log_inv)
    expo = k - log_inv
    preform = (1 - epsilon) ** max(0.0, expo)
    if 0 < expo < 1:
        # the inequality needs exponent >= 1; below that fall back to the pre-form
        tight = min(tight, preform)
    return PProductBound(
        tight=min(max(tight, 0.0), 1.0),
        simple=max(0.0, 1.0 - k * epsilon),
        preform=preform,
    )


def restricted_upper_bound(m, k, r):
    """Ceiling on exact-recovery probability of OMP searching ``r`` random
    indices per iteration (sampling with replacement)."""
    if not 1 <= r < m:
        raise ValueError(f"bound needs 1 <= r < m, got r={r}, m={m}; use 1 for r >= m")
    ell = min(k, int(math.floor(math.sqrt(m * m / r))))
    total = 0.0
    for i in range(k - ell, k):
        gap = k - i
        total += max(0.0, math.exp(-r * gap / m) * (1 - r * gap**2 / m**2))
    term_a = (1 - total / ell) ** ell
    term_b = 1 - (1 - 1 / m) ** r
    return RestrictedUpper(min(term_a, term_b), term_a, term_b, ell)


def restricted_lower_bound(k, alpha1):
    """prod_{j=1..k} (1 - exp(-alpha1 j)) for search fraction alpha1 = r/m."""
    if not 0.0 < alpha1 < 1.0:
        raise ValueError(f"alpha1 must lie in (0, 1), got {alpha1}")
    if k < 1:
        raise ValueError("k must be positive")
    return math.prod(1 - math.exp(-alpha1 * j) for j in range(1, int(k) + 1))


def oracle_complexity(m, k, epsilon):
    """Exact PSG oracle count (sum of the schedule) and the harmonic-sum
    estimate m ln(1/eps) (1 + H_k - H_ceil(ln(1/eps)))."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    exact = sum(schedule_size(i, k, m, epsilon) for i in range(k))
    log_inv = -math.log(epsilon)
    # ln(1/eps) within float noise of an integer is that integer
    near = round(log_inv)
    ceil_log = near if abs(log_inv - near) < 1e-9 else math.ceil(log_inv)
    est = m * log_inv * (1 + harmonic(k) - harmonic(ceil_log))
    return OracleComplexity(exact=exact, harmonic=est)


def q_tilde_bounds(n, m, k, gamma, delta):
    """The two concentration factors lower-bounding the chance that OMP picks
    a support index whenever one is in the search set."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not k < n:
        raise ValueError("need k < n")
    c0 = gamma**2 / 4 - gamma**3 / 6
    q1 = (1 - 2 * math.exp(-n * c0)) ** m - math.exp(-(delta**2) * n / 2)
    smin = 1 - math.sqrt(k / n) - delta
    expo = (1 - gamma) / (1 + gamma) * smin**2 * n / (2 * k)
    q2 = (1 - math.exp(-expo)) ** (k * (m - k))
    vacuous = smin <= 0 or q1 <= 0 or q2 <= 0
    return QTilde(q1, q2, vacuous)


def lemma_ineq_margin(a, b):
    """(1+a)^b - e^(ab) (1 - a^2 b); non-negative for |a| <= 1, b >= 1."""
    if abs(a) > 1 or b < 1:
        raise ValueError(f"need |a| <= 1 and b >= 1, got a={a}, b={b}")
    try:
        return (1 + a) ** b - math.exp(a * b) * (1 - a * a * b)
    except OverflowError:
        # out of float range: only the sign survives, compared in log space
        rest = 1 - a * a * b
        if rest <= 0:
            return math.inf
        return math.inf if b * math.log1p(a) >= a * b + math.log(rest) else -math.inf


def _subset_objectives(A, y, ground):
    """g(T) for every subset T of ``ground``, keyed by bitmask over ``ground``."""
    values = {}
    size = len(ground)
    for mask in range(1 << size):
        cols = [ground[b] for b in range(size) if mask >> b & 1]
        proj, _ = project(state_from_columns(A, cols), y)
        values[mask] = float(proj @ proj)
    return values


def submodularity_ratio(A, y, reference, k):
    """min over L within ``reference`` and disjoint S with 1 <= |S| <= k of
    sum_j [g(L+j) - g(L)] / [g(L+S) - g(L)].

    Pairs whose joint gain is <= 1e-12 (relative to ||y||^2) are skipped;
    returns ``math.inf`` when every pair is skipped.
    """
    A = as_matrix(A, "A")
    n, m = A.shape
    y = as_vector(y, n, "y")
    if m > EXHAUSTIVE_LIMIT or k > 3:
        raise ValueError(f"exhaustive ratio needs m <= {EXHAUSTIVE_LIMIT} and k <= 3, got m={m}, k={k}")
    reference = sorted(set(int(j) for j in reference))
    if any(not 0 <= j < m for j in reference):
        raise ValueError("reference indices out of range")

    ground = list(range(m))
    g = _subset_objectives(A, y, ground)
    skip = RATIO_SKIP * max(float(y @ y), 1e-300)
    ref_mask = sum(1 << j for j in reference)

    best = math.inf
    sub = ref_mask
    while True:
        L = sub
        gL = g[L]
        free = [j for j in ground if not L >> j & 1]
        single = {j: g[L | 1 << j] - gL for j in free}
        for size in range(1, min(k, len(free)) + 1):
            for S in itertools.combinations(free, size):
                S_mask = sum(1 << j for j in S)
                joint = g[L | S_mask] - gL
                if joint <= skip:
                    continue
                best = min(best, sum(single[j] for j in S) / joint)
        if sub == 0:
            break
        sub = (sub - 1) & ref_mask
    return best


def psg_expectation_bound(gamma_ratio, epsilon, m, k):
    """Approximation factor 1 - e^-gamma - gamma eps^eta for E[g(S_psg)] / g(S*).

    eta = 1 + max(0, s/(2m) - 1/(2(m-s))) with s = (m/k) ln(1/eps). When
    s >= m every PSG search set is the full ground set, eta is undefined and
    the factor is the deterministic greedy one, 1 - e^-gamma; the result is
    flagged ``exhaustive``.
    """
    if gamma_ratio <= 0:
        raise ValueError("submodularity ratio must be positive")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    s = m / k * -math.log(epsilon)
    if s >= m:
        return ExpectationBound(1 - math.exp(-gamma_ratio), None, s, True)
    eta = 1 + max(0.0, s / (2 * m) - 1 / (2 * (m - s)))
    factor = 1 - math.exp(-gamma_ratio) - gamma_ratio * epsilon**eta
    return ExpectationBound(factor, eta, s, False)


def all_bounds(params):
    """Every bound applicable to ``params`` as a plain dict (for the CLI)."""
    p = params
    out = {"params": asdict(p)}
    out["p_product"] = asdict(p_product_lower_bound(p.k, p.epsilon))
    out["success_threshold"] = 1 - 2 * p.beta
    out["oracle_complexity"] = asdict(oracle_complexity(p.m, p.k, p.epsilon))
    out["omp_oracle_calls"] = p.m * p.k
    if p.k < p.n:
        out["q_tilde"] = asdict(q_tilde_bounds(p.n, p.m, p.k, p.gamma, p.delta))
    if p.r is not None and 1 <= p.r < p.m:
        out["restricted_upper"] = asdict(restricted_upper_bound(p.m, p.k, p.r))
    out["restricted_lower"] = restricted_lower_bound(p.k, p.alpha1)
    out["restricted_ceiling_limit"] = 1 - math.exp(-p.alpha1)
    try:
        out["sample_size_n"] = sample_size_n(p.k, p.m, p.beta)
    except ValueError as exc:
        out["sample_size_n"] = None
        out["sample_size_note"] = str(exc)
    return out
