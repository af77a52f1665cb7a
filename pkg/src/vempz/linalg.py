"""Structured linear algebra used by the estimators.

Lower-triangular Toeplitz operators stand for the filter matrices of the
pole-zero model: ``A`` and ``B`` (monic, N x N) and the thin delay matrices
``C`` (built from the observation) and ``F`` (built from the excitation).
Products with them are evaluated by convolution; only the residual
covariance is ever stored as a dense N x N array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.signal import lfilter

from .errors import DimensionError, InvalidInput, NumericalError, RankError

__all__ = [
    "LtToeplitz",
    "build_lt_toeplitz",
    "fir_apply",
    "fir_apply_transpose",
    "delay_matrix",
    "lt_toeplitz_gram",
    "monic",
    "solve_spd",
    "spd_inverse",
    "solve_lls",
    "poly_roots",
]

# Multiples of trace(m)/n added to the diagonal before giving up.
_JITTER_STEPS = (0.0, 1e-12, 1e-10, 1e-8)
_RANK_TOL = 1e-10


def monic(coeffs) -> np.ndarray:
    """Return ``[1, *coeffs]`` as a float array."""
    return np.concatenate(([1.0], np.asarray(coeffs, dtype=float).ravel()))


@dataclass(frozen=True)
class LtToeplitz:
    """N x N lower-triangular Toeplitz operator defined by its first column."""

    first_column: np.ndarray
    n: int

    def __post_init__(self):
        col = np.asarray(self.first_column, dtype=float).ravel()
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)

    @property
    def taps(self) -> np.ndarray:
        """First column with trailing zeros removed."""
        nz = np.flatnonzero(self.first_column)
        if nz.size == 0:
            return self.first_column[:1]
        return self.first_column[: nz[-1] + 1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def __matmul__(self, x):
        return fir_apply(self.taps, x)

    def rmatvec(self, x) -> np.ndarray:
        """Product with the transpose."""
        return fir_apply_transpose(self.taps, x)

    def todense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.first_column, np.zeros(self.n))

    def gram(self) -> np.ndarray:
        """Dense ``T.T @ T``."""
        return lt_toeplitz_gram(self.taps, self.n)

    def logdet(self) -> float:
        """log |det|; zero for a monic operator."""
        d = self.first_column[0]
        if d == 0:
            return -np.inf
        return self.n * np.log(abs(d))


def build_lt_toeplitz(coeffs, n: int) -> LtToeplitz:
    """Lower-triangular Toeplitz operator with ``coeffs`` zero-padded to ``n``.

    Raises
    ------
    DimensionError
        If ``coeffs`` is longer than ``n``.
    """
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    if n < 1:
        raise DimensionError(f"dimension must be positive, got {n}")
    if coeffs.size > n:
        raise DimensionError(f"{coeffs.size} coefficients do not fit a {n}x{n} operator")
    col = np.zeros(n)
    col[: coeffs.size] = coeffs
    return LtToeplitz(col, n)


def fir_apply(coeffs, x, axis: int = 0) -> np.ndarray:
    """Causal FIR filtering with zero initial conditions.

    ``out[n] = sum_k coeffs[k] * x[n - k]``, i.e. the product of the
    lower-triangular Toeplitz matrix with first column ``coeffs`` and ``x``.
    Works along ``axis`` for 2-D input.
    """
    x = np.asarray(x, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    if x.size == 0:
        raise DimensionError("cannot filter an empty signal")
    if coeffs.size == 0:
        raise DimensionError("empty coefficient vector")
    return lfilter(coeffs, [1.0], x, axis=axis)


def fir_apply_transpose(coeffs, x, axis: int = 0) -> np.ndarray:
    """Product with the transposed filter matrix (anticausal correlation)."""
    x = np.asarray(x, dtype=float)
    flipped = np.flip(x, axis=axis)
    return np.flip(fir_apply(coeffs, flipped, axis=axis), axis=axis)


def delay_matrix(x, order: int) -> np.ndarray:
    """Thin N x order Toeplitz matrix whose column j holds ``x`` delayed by j+1.

    The first row is zero. With ``x = y`` this is the matrix that gives
    ``A y = y + C a``; with ``x = e`` it gives ``B e = e + F b``.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    out = np.zeros((n, order))
    for j in range(min(order, n)):
        out[j + 1 :, j] = x[: n - j - 1]
    return out


def lt_toeplitz_gram(coeffs, n: int) -> np.ndarray:
    """``T.T @ T`` for the n x n lower-triangular Toeplitz ``T`` with first column ``coeffs``.

    Entry (i, j), i <= j, equals ``sum_{m=0}^{n-1-j} c[m] c[m + j - i]``; the
    upper summation limit is what makes the Gram matrix non-Toeplitz near the
    bottom-right corner.
    """
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size > n:
        raise DimensionError(f"{c.size} coefficients do not fit a {n}x{n} operator")
    g = np.zeros((n, n))
    for d in range(c.size):
        # partial[t] = sum_{m<=t} c[m] c[m+d]
        partial = np.cumsum(c[: c.size - d] * c[d:])
        j = np.arange(d, n)
        limit = np.minimum(n - 1 - j, partial.size - 1)
        vals = partial[limit]
        g[j - d, j] = vals
        g[j, j - d] = vals
    return g


def _check_symmetric(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.max(np.abs(m)), 1.0) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-10 * scale:
        raise InvalidInput("matrix is not symmetric")


def _cholesky(m: np.ndarray):
    n = m.shape[0]
    shift = np.trace(m) / n
    for step in _JITTER_STEPS:
        try:
            return scipy.linalg.cho_factor(m + step * shift * np.eye(n), lower=True)
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("matrix is not positive definite after diagonal jitter")


def solve_spd(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` for symmetric positive-definite ``m``.

    Uses a Cholesky factorization; if it fails, a diagonal jitter of
    1e-12, 1e-10, then 1e-8 times ``trace(m)/n`` is tried before raising
    :class:`NumericalError`.
    """
    m = np.asarray(m, dtype=float)
    _check_symmetric(m)
    factor = _cholesky(m)
    return scipy.linalg.cho_solve(factor, np.asarray(rhs, dtype=float))


def spd_inverse(m, return_logdet: bool = False):
    """Full inverse of an SPD matrix, optionally with ``log det(m^{-1})``."""
    m = np.asarray(m, dtype=float)
    _check_symmetric(m)
    factor = _cholesky(m)
    inv = scipy.linalg.cho_solve(factor, np.eye(m.shape[0]))
    inv = 0.5 * (inv + inv.T)
    if return_logdet:
        return inv, -2.0 * np.sum(np.log(np.diag(factor[0])))
    return inv


def solve_lls(design, target) -> np.ndarray:
    """Least-squares solution of ``design @ x ~= target``.

    Raises
    ------
    RankError
        If the smallest singular value of ``design`` is below 1e-10 times
        the largest.
    """
    design = np.asarray(design, dtype=float)
    target = np.asarray(target, dtype=float)
    if design.ndim != 2 or design.shape[0] != target.shape[0]:
        raise DimensionError(f"design {design.shape} incompatible with target {target.shape}")
    if design.shape[1] == 0:
        return np.zeros(0)
    if design.shape[0] < design.shape[1]:
        raise RankError("underdetermined least-squares system")
    x, _, rank, sv = np.linalg.lstsq(design, target, rcond=None)
    if sv[0] == 0 or sv[-1] < _RANK_TOL * sv[0]:
        raise RankError(
            f"design matrix is rank deficient (singular values {sv[-1]:.3g} / {sv[0]:.3g})"
        )
    return x


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial given in descending powers (companion eigenvalues)."""
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size < 2:
        raise DimensionError("polynomial degree must be at least 1")
    if c[0] == 0:
        raise InvalidInput("leading coefficient must be nonzero")
    return np.roots(c / c[0]).astype(complex)
