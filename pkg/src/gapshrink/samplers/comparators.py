"""Comparator Gibbs samplers for sparse regression: the Bayesian lasso
(exponential scale mixture) and the generalized double Pareto prior in its
hierarchical Laplace form.  Both share the output contract of the
gap-shrinkage sampler so experiment code can treat methods uniformly."""

from __future__ import annotations

import time

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ..errors import NumericError
from ..rng import inverse_gaussian, slice_sample_1d, stream
from .base import PosteriorSamples, flat_names

__all__ = ["gibbs_bayesian_lasso", "gibbs_gdp"]

_SCALES, _THETA, _LAM, _SIGMA, _INIT = range(5)

_EPS_ABS = 1e-8


def _draw_theta(XtX, Xty, prior_prec_diag, sigma2, rng):
    """theta ~ N(A^-1 X'y, sigma2 A^-1) with A = X'X + diag(prior_prec)."""
    A = XtX.copy()
    A[np.diag_indices_from(A)] += prior_prec_diag
    try:
        cf = cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError("regression precision not positive definite") from exc
    mean = cho_solve(cf, Xty, check_finite=False)
    noise = solve_triangular(
        cf[0], rng.standard_normal(Xty.size), lower=True, trans="T",
        check_finite=False,
    )
    return mean + np.sqrt(sigma2) * noise


def gibbs_bayesian_lasso(X, y, config):
    """Scale-mixture Gibbs sampler for the Bayesian lasso.

    theta_j | tau_j^2 ~ N(0, sigma2 tau_j^2), tau_j^2 ~ Exp(lam^2 / 2);
    lam gets the same inverse-gamma hyperprior as the gap model and is
    updated by slice sampling on the log scale.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    a_lam, b_lam = config.hyperpriors["lam"]
    a_sig, b_sig = config.hyperpriors["sigma2"]
    seed, chain = config.seed, config.chain_id

    XtX = X.T @ X
    Xty = X.T @ y

    rng0 = stream(seed, chain, 0, _INIT)
    theta = 0.01 * rng0.standard_normal(p)
    tau2 = np.ones(p)
    lam = 1.0
    sigma2 = float(np.var(y)) or 1.0

    total = config.warmup + config.retain
    kept = config.retain // config.thinning
    draws = np.empty((kept, p + 2))
    row = 0
    t0 = time.perf_counter()

    for sweep in range(1, total + 1):
        rng = stream(seed, chain, sweep, _SCALES)
        abs_theta = np.maximum(np.abs(theta), _EPS_ABS)
        inv_tau2 = inverse_gaussian(
            lam * np.sqrt(sigma2) / abs_theta, np.full(p, lam * lam), rng
        )
        tau2 = 1.0 / inv_tau2

        rng = stream(seed, chain, sweep, _THETA)
        theta = _draw_theta(XtX, Xty, inv_tau2, sigma2, rng)

        rng = stream(seed, chain, sweep, _SIGMA)
        resid = y - X @ theta
        shape = a_sig + 0.5 * (n + p)
        rate = b_sig + 0.5 * (
            float(resid @ resid) + float(np.sum(theta**2 * inv_tau2))
        )
        sigma2 = rate / rng.standard_gamma(shape)

        rng = stream(seed, chain, sweep, _LAM)
        tau2_sum = float(np.sum(tau2))

        def lam_logf(ell):
            return (
                (2.0 * p - a_lam) * ell
                - 0.5 * tau2_sum * np.exp(2.0 * ell)
                - b_lam * np.exp(-ell)
            )

        lam = float(np.exp(slice_sample_1d(lam_logf, np.log(lam), 0.5, rng)))

        if sweep > config.warmup:
            k = sweep - config.warmup - 1
            if k % config.thinning == 0 and row < kept:
                draws[row, :p] = theta
                draws[row, p] = lam
                draws[row, p + 1] = sigma2
                row += 1

    names = flat_names("theta", p) + ["lam", "sigma2"]
    meta = {
        "model": "bayesian_lasso",
        "seed": seed,
        "chain_id": chain,
        "config_digest": config.digest(),
        "wall_seconds": time.perf_counter() - t0,
        "warmup": config.warmup,
        "retain": config.retain,
    }
    return PosteriorSamples(draws[:row], names, meta)


def gibbs_gdp(X, y, config):
    """Generalized double Pareto prior via its hierarchical Laplace form.

    Each coordinate has its own Laplace rate lam_j with a gamma conditional;
    the Laplace factor is expanded as the usual exponential scale mixture.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    a_gdp, eta = config.hyperpriors["gdp"]
    a_sig, b_sig = config.hyperpriors["sigma2"]
    seed, chain = config.seed, config.chain_id

    XtX = X.T @ X
    Xty = X.T @ y

    rng0 = stream(seed, chain, 0, _INIT)
    theta = 0.01 * rng0.standard_normal(p)
    lam_j = np.ones(p)
    sigma2 = float(np.var(y)) or 1.0

    total = config.warmup + config.retain
    kept = config.retain // config.thinning
    draws = np.empty((kept, p + 1))
    row = 0
    t0 = time.perf_counter()

    for sweep in range(1, total + 1):
        rng = stream(seed, chain, sweep, _SCALES)
        sigma = np.sqrt(sigma2)
        abs_theta = np.maximum(np.abs(theta), _EPS_ABS)
        lam_j = rng.standard_gamma(a_gdp + 1.0, size=p) / (
            eta + abs_theta / sigma
        )
        lam_j = np.maximum(lam_j, _EPS_ABS)
        inv_s = inverse_gaussian(lam_j * sigma / abs_theta, lam_j**2, rng)

        rng = stream(seed, chain, sweep, _THETA)
        theta = _draw_theta(XtX, Xty, inv_s, sigma2, rng)

        rng = stream(seed, chain, sweep, _SIGMA)
        resid = y - X @ theta
        shape = a_sig + 0.5 * (n + p)
        rate = b_sig + 0.5 * (
            float(resid @ resid) + float(np.sum(theta**2 * inv_s))
        )
        sigma2 = rate / rng.standard_gamma(shape)

        if sweep > config.warmup:
            k = sweep - config.warmup - 1
            if k % config.thinning == 0 and row < kept:
                draws[row, :p] = theta
                draws[row, p] = sigma2
                row += 1

    names = flat_names("theta", p) + ["sigma2"]
    meta = {
        "model": "gdp",
        "seed": seed,
        "chain_id": chain,
        "config_digest": config.digest(),
        "wall_seconds": time.perf_counter() - t0,
        "warmup": config.warmup,
        "retain": config.retain,
    }
    return PosteriorSamples(draws[:row], names, meta)
