"""Blocked Gibbs sampler for sparse linear regression under the l1
gap-shrinkage prior with a Cauchy base kernel.

Model: y = X theta + noise, noise ~ N(0, sigma2 I).  The prior couples
theta with a box-constrained dual vector u through the gap
sum_j (lam - |u_j|) |theta_j|; lam acts as the global shrinkage level and
each |u_j| climbing toward lam is the local escape that releases one
coordinate.  Two scale-mixture augmentations make the theta block jointly
Gaussian: an exponential mixture for each exp(-a_j |theta_j|) factor and
an inverse-gamma mixture for each Cauchy kernel factor.  Hyperparameter
updates use the collapsed (mixture-free) conditionals.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ..errors import NumericError
from ..rng import inverse_gaussian, slice_sample_1d, stream, truncated_normal
from .base import ChainState, PosteriorSamples, flat_names

__all__ = [
    "gibbs_sparse_regression",
    "dual_conditional_logpdf",
    "dual_conditional_draw",
]

_SCALES, _THETA, _DUAL, _LAM, _SIGMA, _INIT = range(6)

_EPS_ABS = 1e-8


def _chol_normal(prec, lin, rng):
    cf = cho_factor(prec, lower=True, check_finite=False)
    mean = cho_solve(cf, lin, check_finite=False)
    noise = solve_triangular(
        cf[0], rng.standard_normal(lin.size), lower=True, trans="T",
        check_finite=False,
    )
    return mean + noise


def _draw_gaussian_block(prec, lin, rng, block=50):
    """Draw from N(prec^-1 lin, prec^-1); falls back to fixed-size
    coordinate blocks when the joint Cholesky fails."""
    p = prec.shape[0]
    try:
        return _chol_normal(prec, lin, rng)
    except np.linalg.LinAlgError:
        pass
    theta = np.zeros(p)
    for start in range(0, p, block):
        idx = slice(start, min(start + block, p))
        rest = np.ones(p, dtype=bool)
        rest[idx] = False
        lin_b = lin[idx] - prec[idx, :][:, rest] @ theta[rest]
        try:
            theta[idx] = _chol_normal(prec[idx, idx], lin_b, rng)
        except np.linalg.LinAlgError as exc:
            raise NumericError(
                "conditional precision is not positive definite "
                f"(min diagonal {np.min(np.diag(prec)):.3e})"
            ) from exc
    return theta


def dual_conditional_logpdf(x, theta_j, w_j, lam, alpha):
    """Log density (unnormalized) of one dual coordinate given the rest.

    exp(alpha * x * theta_j - (theta_j + x)^2 / (2 w_j)) on the sign-matched
    part of [-lam, lam]; -inf outside.
    """
    if abs(x) > lam:
        return -np.inf
    if theta_j > 0 and x < 0:
        return -np.inf
    if theta_j < 0 and x > 0:
        return -np.inf
    return alpha * x * theta_j - (theta_j + x) ** 2 / (2.0 * w_j)


def dual_conditional_draw(theta_j, w_j, lam, alpha, rng):
    """Exact truncated-normal draw from the dual coordinate conditional."""
    mean = theta_j * (alpha * w_j - 1.0)
    sd = np.sqrt(w_j)
    lo = 0.0 if theta_j > 0 else -lam
    hi = 0.0 if theta_j < 0 else lam
    return float(truncated_normal(mean, sd, lo, hi, rng, size=()))


def gibbs_sparse_regression(X, y, config):
    """Run one chain; returns draws of (theta, u, lam, sigma2).

    Sweep order: augmentation scales, theta block (joint Gaussian), dual
    coordinates (truncated normals), lam (slice on the log scale against
    the collapsed conditional), sigma2 (conjugate inverse-gamma).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if y.size != n:
        raise ValueError("y length must match rows of X")
    alpha = config.alpha
    a_lam, b_lam = config.hyperpriors["lam"]
    a_sig, b_sig = config.hyperpriors["sigma2"]
    seed, chain = config.seed, config.chain_id

    XtX = X.T @ X
    Xty = X.T @ y

    rng0 = stream(seed, chain, 0, _INIT)
    theta = 0.1 * rng0.standard_cauchy(p)
    u = np.zeros(p)
    lam = 1.0
    sigma2 = float(np.var(y)) or 1.0

    total = config.warmup + config.retain
    kept = config.retain // config.thinning
    draws = np.empty((kept, 2 * p + 2))
    row = 0
    t0 = time.perf_counter()

    for sweep in range(1, total + 1):
        rng = stream(seed, chain, sweep, _SCALES)
        a = np.maximum(alpha * (lam - np.abs(u)), _EPS_ABS)
        abs_theta = np.maximum(np.abs(theta), _EPS_ABS)
        inv_s = inverse_gaussian(a / abs_theta, a * a, rng)
        resid_ku = theta + u
        w = ((1.0 + resid_ku**2) / 2.0) / rng.standard_gamma(1.0, size=p)
        inv_w = 1.0 / w

        rng = stream(seed, chain, sweep, _THETA)
        prec = XtX / sigma2
        prec[np.diag_indices_from(prec)] += inv_s + inv_w
        lin = Xty / sigma2 - u * inv_w
        theta = _draw_gaussian_block(prec, lin, rng)

        rng = stream(seed, chain, sweep, _DUAL)
        mean_u = theta * (alpha * w - 1.0)
        lo = np.where(theta > 0, 0.0, -lam)
        hi = np.where(theta < 0, 0.0, lam)
        u = truncated_normal(mean_u, np.sqrt(w), lo, hi, rng)

        rng = stream(seed, chain, sweep, _LAM)
        abs_sum = float(np.sum(np.abs(theta)))
        floor = np.log(max(np.max(np.abs(u)), 1e-300))

        def lam_logf(ell):
            return -a_lam * ell - b_lam * np.exp(-ell) - alpha * abs_sum * np.exp(ell)

        lam = float(
            np.exp(
                slice_sample_1d(
                    lam_logf, np.log(lam), 1.0, rng, bounds=(floor, np.inf)
                )
            )
        )

        rng = stream(seed, chain, sweep, _SIGMA)
        resid = y - X @ theta
        shape = a_sig + 0.5 * n
        rate = b_sig + 0.5 * float(resid @ resid)
        sigma2 = rate / rng.standard_gamma(shape)

        if sweep > config.warmup:
            k = sweep - config.warmup - 1
            if k % config.thinning == 0 and row < kept:
                state = ChainState(
                    latents={"theta": theta},
                    duals={"u": u},
                    scales={"inv_s": inv_s, "inv_w": inv_w},
                    hypers={"lam": lam, "sigma2": sigma2},
                    rng_key=(seed, chain),
                )
                state.validate({"u": lam})
                draws[row, :p] = theta
                draws[row, p : 2 * p] = u
                draws[row, 2 * p] = lam
                draws[row, 2 * p + 1] = sigma2
                row += 1

    names = flat_names("theta", p) + flat_names("u", p) + ["lam", "sigma2"]
    meta = {
        "model": "gap_sparse_regression",
        "seed": seed,
        "chain_id": chain,
        "config_digest": config.digest(),
        "wall_seconds": time.perf_counter() - t0,
        "warmup": config.warmup,
        "retain": config.retain,
        "alpha": alpha,
    }
    return PosteriorSamples(draws[:row], names, meta)
