"""Independent dense reference computations for the VEM engine.

Everything here materialises the full filter matrices and uses explicit
inverses, so it shares no code path with the structured implementation.
"""

import numpy as np
import scipy.linalg
from scipy import stats


def dense_filter(coeffs, n):
    col = np.zeros(n)
    col[0] = 1.0
    col[1 : 1 + len(coeffs)] = coeffs
    return scipy.linalg.toeplitz(col, np.zeros(n))


def block_index(n, d):
    return np.arange(n) // d


def dense_e_step(y, a, b, d, e_gamma, e_alpha, hyper):
    """One E-step: q(e), then q(alpha), then q(gamma), by direct matrix algebra.

    ``e_alpha`` has one entry per block. ``hyper = (c, d, e, f)``.
    """
    c0, d0, e0, f0 = hyper
    n = len(y)
    A, B = dense_filter(a, n), dense_filter(b, n)
    idx = block_index(n, d)
    gam_e = np.diag(np.asarray(e_alpha)[idx])
    sigma = np.linalg.inv(e_gamma * B.T @ B + gam_e)
    mu = e_gamma * sigma @ B.T @ A @ y
    r = sigma + np.outer(mu, mu)
    n_blocks = idx[-1] + 1
    shape_a = np.array([e0 + np.sum(idx == o) / 2 for o in range(n_blocks)])
    rate_a = np.array([f0 + sum(r[i, i] for i in range(n) if idx[i] == o) / 2 for o in range(n_blocks)])
    resid = A @ y - B @ mu
    shape_g = c0 + n / 2
    rate_g = d0 + (np.trace(sigma @ B.T @ B) + resid @ resid) / 2
    return dict(mu=mu, sigma=sigma, r=r, shape_a=shape_a, rate_a=rate_a, shape_g=shape_g, rate_g=rate_g)


def dense_expected_sq_error(y, a, b, mu, sigma):
    n = len(y)
    A, B = dense_filter(a, n), dense_filter(b, n)
    resid = A @ y - B @ mu
    return resid @ resid + np.trace(B @ sigma @ B.T)


def allpole_vem(y, k, hyper, gamma0=10.0, alpha0=1.0, iters=10):
    """All-pole (B = I), one precision per sample, written out from scratch."""
    c0, d0, e0, f0 = hyper
    y = np.asarray(y, float)
    n = len(y)
    a = np.zeros(k)
    e_gamma = gamma0
    e_alpha = np.full(n, alpha0)
    for _ in range(iters):
        A = dense_filter(a, n)
        sigma = np.linalg.inv(e_gamma * np.eye(n) + np.diag(e_alpha))
        mu = e_gamma * sigma @ A @ y
        r = sigma + np.outer(mu, mu)
        e_alpha = (e0 + 0.5) / (f0 + np.diag(r) / 2)
        resid = A @ y - mu
        e_gamma = (c0 + n / 2) / (d0 + (np.trace(sigma) + resid @ resid) / 2)
        # a minimises ||y + C a - mu||^2 with C[i, j] = y[i - j - 1]
        C = np.array([[y[i - j - 1] if i - j - 1 >= 0 else 0.0 for j in range(k)] for i in range(n)])
        a = np.linalg.solve(C.T @ C, C.T @ (mu - y))
    return dict(a=a, mu=mu, sigma=sigma, alpha=e_alpha, gamma=e_gamma)


def elbo_reference(y, a, b, d, mu, sigma, shape_a, rate_a, shape_g, rate_g, hyper):
    """Bound assembled from scipy.stats densities and entropies."""
    c0, d0, e0, f0 = hyper
    n = len(y)
    idx = block_index(n, d)
    qg = stats.gamma(shape_g, scale=1 / rate_g)
    qa = [stats.gamma(s, scale=1 / r) for s, r in zip(shape_a, rate_a)]
    e_g, e_log_g = qg.mean(), qg.expect(np.log)
    e_a = np.array([q.mean() for q in qa])
    e_log_a = np.array([q.expect(np.log) for q in qa])

    sq = dense_expected_sq_error(y, a, b, mu, sigma)
    lik = n / 2 * e_log_g - n / 2 * np.log(2 * np.pi) - e_g * sq / 2
    diag_r = np.diag(sigma) + mu**2
    prior_e = sum(0.5 * e_log_a[idx[i]] - 0.5 * np.log(2 * np.pi) - 0.5 * e_a[idx[i]] * diag_r[i] for i in range(n))
    pg = stats.gamma(c0, scale=1 / d0)
    pa = stats.gamma(e0, scale=1 / f0)
    prior_g = qg.expect(pg.logpdf)
    prior_a = sum(q.expect(pa.logpdf) for q in qa)
    h = stats.multivariate_normal(mu, sigma).entropy() + qg.entropy() + sum(q.entropy() for q in qa)
    return lik + prior_e + prior_g + prior_a + h
