"""Reference estimators: 2-norm LP, 1-norm LP and two-stage least-squares pole-zero.

All return denominator coefficients in the convention
``A(z) = 1 + a_1 z^-1 + ... + a_K z^-K``, so the prediction residual is
``y(n) + sum_k a_k y(n-k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInput, RankError
from .linalg import delay_matrix, fir_apply, monic, solve_lls
from .model import PoleZeroModel, as_samples

__all__ = [
    "IrlsConfig",
    "autocorrelation",
    "levinson_durbin",
    "lp2",
    "lp_covariance",
    "lp1",
    "lp1_objective",
    "ts_ls_pz",
    "ts_ls_stage2",
    "default_long_order",
]


def autocorrelation(y, max_lag: int) -> np.ndarray:
    """Biased (unnormalised) autocorrelation ``r[k] = sum_n y[n] y[n-k]``."""
    y = as_samples(y)
    full = np.correlate(y, y, mode="full")[y.size - 1 :]
    out = np.zeros(max_lag + 1)
    out[: min(full.size, max_lag + 1)] = full[: max_lag + 1]
    return out


def levinson_durbin(r, order: int):
    """Solve the Toeplitz normal equations recursively.

    Returns
    -------
    a : ndarray, shape (order,)
        Prediction coefficients (sign convention ``1 + sum a_k z^-k``).
    k : ndarray, shape (order,)
        Reflection coefficients.
    err : float
        Final prediction error power.
    """
    r = np.asarray(r, dtype=float)
    if r[0] <= 0:
        raise InvalidInput("zero-lag autocorrelation must be positive")
    a = np.zeros(order)
    refl = np.zeros(order)
    err = r[0]
    for i in range(order):
        acc = r[i + 1] + a[:i] @ r[i:0:-1]
        ki = -acc / err
        refl[i] = ki
        a[:i] = a[:i] + ki * a[:i][::-1]
        a[i] = ki
        err *= 1.0 - ki * ki
        if err <= 0:
            # perfectly predictable signal; higher orders add nothing
            break
    return a, refl, err


def lp2(frame, k: int) -> np.ndarray:
    """Autocorrelation-method linear prediction (minimum-phase by construction)."""
    y = as_samples(frame)
    if y.size <= k:
        raise DimensionError(f"frame of {y.size} samples is too short for order {k}")
    r = autocorrelation(y, k)
    if r[0] == 0:
        raise InvalidInput("all-zero frame")
    a, _, _ = levinson_durbin(r, k)
    return a


def _covariance_system(y, k: int, start: int | None = None):
    start = k if start is None else start
    design = delay_matrix(y, k)[start:]
    return design, -y[start:]


def lp_covariance(frame, k: int) -> np.ndarray:
    """Covariance-method LP: least squares over ``n = k..N-1``."""
    y = as_samples(frame)
    if y.size <= k:
        raise DimensionError(f"frame of {y.size} samples is too short for order {k}")
    if k == 0:
        return np.zeros(0)
    return solve_lls(*_covariance_system(y, k))


@dataclass(frozen=True)
class IrlsConfig:
    """``epsilon=None`` means ``1e-8 * max|y|``."""

    max_iters: int = 50
    epsilon: float | None = None
    tol: float = 1e-8

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidInput("max_iters must be at least 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InvalidInput("epsilon must be positive")


def lp1_objective(frame, a) -> float:
    """``sum_{n>=K} |y(n) + sum_k a_k y(n-k)|``."""
    y = as_samples(frame)
    design, target = _covariance_system(y, len(a))
    return float(np.sum(np.abs(design @ a - target)))


def lp1(frame, k: int, cfg: IrlsConfig | None = None, history: list | None = None) -> np.ndarray:
    """Least 1-norm linear prediction by iteratively reweighted least squares.

    Weights are ``1 / max(|r_n|, epsilon)``; the first iterate (uniform
    weights) is the covariance-method solution. If ``history`` is given,
    the objective after each iterate is appended to it.
    """
    cfg = IrlsConfig() if cfg is None else cfg
    y = as_samples(frame)
    if y.size <= k:
        raise DimensionError(f"frame of {y.size} samples is too short for order {k}")
    if k == 0:
        return np.zeros(0)
    eps = cfg.epsilon if cfg.epsilon is not None else 1e-8 * np.max(np.abs(y))
    if eps <= 0:
        raise InvalidInput("all-zero frame")
    design, target = _covariance_system(y, k)
    weights = np.ones(target.size)
    a = None
    for _ in range(cfg.max_iters):
        sw = np.sqrt(weights)
        a_new = solve_lls(design * sw[:, None], target * sw)
        resid = design @ a_new - target
        if history is not None:
            history.append(float(np.sum(np.abs(resid))))
        done = a is not None and np.linalg.norm(a_new - a) <= cfg.tol * max(np.linalg.norm(a_new), 1e-300)
        a = a_new
        if done:
            break
        weights = 1.0 / np.maximum(np.abs(resid), eps)
    return a


def default_long_order(n: int, k: int, l: int) -> int:
    return min(4 * (k + l), n // 4)


def ts_ls_stage2(frame, excitation, k: int, l: int, start: int):
    """Joint least squares for ``y(n) + sum a_k y(n-k) - sum b_l x(n-l) = x(n)``, ``n >= start``.

    ``x`` is an excitation estimate (or the true excitation).
    """
    y = as_samples(frame)
    x = np.asarray(excitation, dtype=float).ravel()
    design = np.hstack([delay_matrix(y, k), -delay_matrix(x, l)])[start:]
    target = (x - y)[start:]
    coef = solve_lls(design, target)
    return coef[:k], coef[k:]


def ts_ls_pz(frame, k: int, l: int, long_order: int | None = None) -> PoleZeroModel:
    """Two-stage least-squares pole-zero estimate.

    Stage 1 fits a covariance-method AR model of order ``long_order`` and
    inverse-filters the frame to get an excitation estimate; stage 2 is
    :func:`ts_ls_stage2` on rows where that estimate is fully defined. With
    ``l = 0`` there is no moving-average part and the result is the
    covariance-method LP of order ``k``.
    """
    y = as_samples(frame)
    n = y.size
    if l == 0:
        return PoleZeroModel(lp_covariance(y, k), []).with_power_gain(y)
    long_order = default_long_order(n, k, l) if long_order is None else long_order
    if not n > long_order > k + l:
        raise DimensionError(
            f"need N > long_order > K + L, got N={n}, long_order={long_order}, K+L={k + l}"
        )
    try:
        a_long = lp_covariance(y, long_order)
    except RankError as exc:
        raise RankError(f"stage 1 failed: {exc}") from exc
    e_hat = fir_apply(monic(a_long), y)
    start = max(k, long_order + l)
    try:
        a, b = ts_ls_stage2(y, e_hat, k, l, start)
    except RankError as exc:
        raise RankError(f"stage 2 failed: {exc}") from exc
    return PoleZeroModel(a, b).with_power_gain(y)
