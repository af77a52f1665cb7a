"""Uniform entry point for every estimator."""

from __future__ import annotations

import numpy as np

from .baselines import default_long_order, lp1, lp2, lp_covariance, ts_ls_pz
from .errors import InvalidInput
from .linalg import fir_apply, monic
from .model import PoleZeroModel, as_samples
from .vem import AnalysisResult, VemConfig, run_vem

__all__ = ["METHODS", "analyze"]

METHODS = ("vem-pz", "vem-ap", "lp2", "lp1", "ts-ls-pz")


def analyze(
    frame,
    method: str = "vem-pz",
    k: int | None = None,
    l: int | None = None,
    block_size: int = 8,
    max_iters: int = 100,
    tol: float = 1e-6,
    long_order: int | None = None,
    vem_config: VemConfig | None = None,
) -> AnalysisResult:
    """Run ``method`` on one frame.

    Defaults follow the synthetic-frame setup: K = L = 5 for pole-zero
    methods and K = 10 for all-pole ones. ``vem-ap`` is ``vem-pz`` with
    ``L = 0``. Residuals of the covariance-type baselines are zero over the
    samples they cannot predict.
    """
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    y = as_samples(frame)
    pole_zero = method in ("vem-pz", "ts-ls-pz")
    k = (5 if pole_zero else 10) if k is None else k
    l = (5 if pole_zero else 0) if l is None else l
    if method == "vem-ap":
        l = 0
    elif not pole_zero and l:
        raise InvalidInput(f"{method} is all-pole; L must be 0")

    if method in ("vem-pz", "vem-ap"):
        if vem_config is None:
            vem_config = VemConfig(
                k_order=k, l_order=l, block_size=block_size, max_iters=max_iters, elbo_rel_tol=tol
            )
        return run_vem(frame, vem_config)

    if method == "lp2":
        a = lp2(y, k)
        resid = fir_apply(monic(a), y)
        model = PoleZeroModel(a, [])
    elif method == "lp1":
        a = lp1(y, k)
        resid = fir_apply(monic(a), y)
        resid[:k] = 0.0
        model = PoleZeroModel(a, [])
    else:
        model = ts_ls_pz(y, k, l, long_order)
        resid = _ts_residual(y, model, k, l, long_order)
    return AnalysisResult(
        model=model.with_power_gain(y),
        residual_mean=resid,
        iterations=0,
        method=method,
    )


def _ts_residual(y, model, k, l, long_order):
    if l == 0:
        resid = fir_apply(model.denominator, y)
        resid[:k] = 0.0
        return resid
    long_order = default_long_order(y.size, k, l) if long_order is None else long_order
    e_hat = fir_apply(monic(lp_covariance(y, long_order)), y)
    resid = fir_apply(model.denominator, y) - (fir_apply(model.numerator, e_hat) - e_hat)
    resid[: max(k, long_order + l)] = 0.0
    return np.asarray(resid)
