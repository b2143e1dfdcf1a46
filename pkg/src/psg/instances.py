"""Seeded generators for sparse-recovery and planted column-subset instances."""

import math
from dataclasses import dataclass, field

import numpy as np

from psg.rng import make_rng


@dataclass(frozen=True)
class SparseInstance:
    """Noiseless k-sparse recovery problem y = A x."""

    A: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    support: tuple
    seed: int

    @property
    def shape(self):
        return self.A.shape


@dataclass(frozen=True)
class CssInstance:
    """Unit-norm-column matrix whose columns lie close to span(D[:, planted])."""

    D: np.ndarray = field(repr=False)
    planted: tuple
    perturbation: float
    seed: int


def gen_instance(m, n, k, seed):
    """Draw A ~ N(0, 1/n) of shape (n, m), a uniform size-k support and
    standard normal nonzeros; return the noiseless instance.

    ``n`` may exceed ``m``: the measurement counts produced by
    :func:`sample_size_n` at small k routinely do.
    """
    m, n, k = int(m), int(n), int(k)
    if k < 1 or n < 1 or m < 1:
        raise ValueError("m, n, k must be positive")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of measurements n={n}")
    if k > m:
        raise ValueError(f"k={k} exceeds the signal dimension m={m}")

    rng = make_rng(seed)
    A = rng.standard_normal((n, m)) / math.sqrt(n)
    support = np.sort(rng.choice(m, size=k, replace=False))
    x = np.zeros(m)
    x[support] = rng.standard_normal(k)
    y = A @ x
    return SparseInstance(A, x, y, tuple(int(j) for j in support), int(seed))


def sample_size_n(k, m, beta):
    """Measurements n = ceil(6 k ln(m / (k (4 beta)^(1/6))))."""
    if not (m > k >= 1):
        raise ValueError(f"need m > k >= 1, got m={m}, k={k}")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    arg = m / (k * (4.0 * beta) ** (1.0 / 6.0))
    if arg <= 1.0:
        raise ValueError(f"log argument {arg:.6g} <= 1: no positive sample size in this regime")
    value = 6.0 * k * math.log(arg)
    return int(math.ceil(value - 1e-9 * value))


def gen_css_instance(n_rows, m_cols, span_size, perturbation, seed):
    """Gaussian matrix whose non-planted columns are pulled toward the span of
    the last ``span_size`` columns, then column-normalized.

    Each non-planted column c becomes P_L c + perturbation * (I - P_L) c.
    """
    n_rows, m_cols, span_size = int(n_rows), int(m_cols), int(span_size)
    if n_rows < 1 or m_cols < 1 or span_size < 1:
        raise ValueError("dimensions must be positive")
    if span_size >= m_cols:
        raise ValueError("span_size must be smaller than m_cols")
    if span_size > n_rows:
        raise ValueError("span_size cannot exceed n_rows")
    if perturbation < 0 or not math.isfinite(perturbation):
        raise ValueError("perturbation must be a finite non-negative number")

    rng = make_rng(seed)
    D = rng.standard_normal((n_rows, m_cols))
    planted = np.arange(m_cols - span_size, m_cols)
    Q, _ = np.linalg.qr(D[:, planted])
    rest = D[:, : m_cols - span_size]
    inside = Q @ (Q.T @ rest)
    D[:, : m_cols - span_size] = inside + perturbation * (rest - inside)
    D /= np.linalg.norm(D, axis=0)
    return CssInstance(D, tuple(int(j) for j in planted), float(perturbation), int(seed))
