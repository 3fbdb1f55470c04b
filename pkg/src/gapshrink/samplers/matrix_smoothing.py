"""Blocked Gibbs sampler for low-rank plus sparse matrix smoothing.

Data are repeated noisy copies of one matrix; the mean matrix is
parameterized as theta = A B^T so the nuclear norm enters through the
factorization identity 0.5 (||A||_F^2 + ||B||_F^2).  The dual splits into
V1 (nuclear side, with strength tied as lam1 = ||V1||_F, which keeps V1
operator-norm feasible for free) and V2 (elementwise box |V2| <= lam2).
Rows of A and B are jointly Gaussian given the elementwise exponential
scale mixture for the lam2 ||theta||_1 factor; V2 coordinates are
truncated normals; V1 coordinates move by slice sampling because lam1
rides along with every entry.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..rng import (
    BufferedUniform,
    inverse_gaussian,
    slice_sample_1d,
    stream,
    truncated_normal,
)
from .base import ChainState, PosteriorSamples, flat_names

__all__ = [
    "gibbs_matrix_smoothing",
    "v2_conditional_logpdf",
    "v2_conditional_draw",
    "v1_conditional_logpdf",
    "v1_conditional_step",
]

_ROWS_A, _ROWS_B, _SCALES, _V2, _V1, _SIGMA, _LAM2, _INIT = range(8)

_EPS_ABS = 1e-8
# Gaussian base kernel on the anchor has variance 100 per entry
_KERNEL_VAR = 100.0


def v2_conditional_logpdf(x, theta_ij, v1_ij, lam2, alpha):
    """Log density of one sparse-dual entry given everything else."""
    if abs(x) > lam2:
        return -np.inf
    c = theta_ij + v1_ij
    return alpha * theta_ij * x - (c + x) ** 2 / (2.0 * _KERNEL_VAR)


def v2_conditional_draw(theta_ij, v1_ij, lam2, alpha, rng):
    """Exact truncated-normal draw matching v2_conditional_logpdf."""
    mean = _KERNEL_VAR * alpha * theta_ij - (theta_ij + v1_ij)
    return float(
        truncated_normal(mean, math.sqrt(_KERNEL_VAR), -lam2, lam2, rng, size=())
    )


def v1_conditional_logpdf(x, theta_ij, c2_ij, coupling, r2_rest, alpha):
    """Log density of one nuclear-dual entry; coupling is
    alpha * (||A||_F^2 + ||B||_F^2) / 2 and r2_rest the squared Frobenius
    norm of V1 excluding this entry (lam1 moves with the entry)."""
    return (
        alpha * theta_ij * x
        - coupling * math.sqrt(r2_rest + x * x)
        - (c2_ij + x) ** 2 / (2.0 * _KERNEL_VAR)
    )


def v1_conditional_step(x0, theta_ij, c2_ij, coupling, r2_rest, alpha, rng,
                        width=None):
    """One slice move on a nuclear-dual entry."""
    if width is None:
        width = min(10.0, max(1e-7, 3.0 / (1.0 + coupling)))

    def logf(x):
        return v1_conditional_logpdf(x, theta_ij, c2_ij, coupling, r2_rest, alpha)

    return slice_sample_1d(logf, x0, width, rng)


def _draw_rows(G, base_prec, ridge, rhs, rng):
    """Batched draws from per-row Gaussians N(Q^-1 rhs, Q^-1) with
    Q = G + base_prec + ridge * I, G stacked per row."""
    rows, r = rhs.shape
    Q = G + base_prec[None, :, :]
    Q[:, np.arange(r), np.arange(r)] += ridge
    L = np.linalg.cholesky(Q)
    mean = np.linalg.solve(Q, rhs[..., None])[..., 0]
    z = rng.standard_normal((rows, r, 1))
    noise = np.linalg.solve(np.transpose(L, (0, 2, 1)), z)[..., 0]
    return mean + noise


def gibbs_matrix_smoothing(Y, config):
    """Run one chain; returns draws of (A, B, V1, V2, sigma2, lam1, lam2)
    plus the leading singular values of theta = A B^T per draw.

    Sweep order: rows of A, rows of B, elementwise scale mixtures, V2
    (truncated normals), V1 (coordinatewise slice under the lam1 coupling),
    sigma2 (conjugate), lam2 (slice on the log scale).
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 3:
        raise ValueError("Y must be a stack of matrices (S x p1 x p2)")
    S, p1, p2 = Y.shape
    r = config.rank
    if r > min(p1, p2):
        raise ValueError("rank exceeds matrix dimensions")
    alpha = config.alpha
    a_l2, b_l2 = config.hyperpriors["lam2"]
    a_sig, b_sig = config.hyperpriors["sigma2"]
    seed, chain = config.seed, config.chain_id

    Ybar = Y.mean(axis=0)
    ss0 = float(np.sum((Y - Ybar) ** 2))

    rng0 = stream(seed, chain, 0, _INIT)
    A = rng0.standard_normal((p1, r))
    B = rng0.standard_normal((p2, r))
    V1 = np.zeros((p1, p2))
    V2 = np.zeros((p1, p2))
    inv_s = np.ones((p1, p2))
    sigma2 = float(np.var(Y)) or 1.0
    lam2 = 1.0

    total = config.warmup + config.retain
    kept = config.retain // config.thinning
    n_sv = min(6, min(p1, p2))
    cols = (p1 + p2) * r + 2 * p1 * p2 + 3 + n_sv
    draws = np.empty((kept, cols))
    row = 0
    t0 = time.perf_counter()

    for sweep in range(1, total + 1):
        lam1 = float(np.linalg.norm(V1))
        V = V1 + V2

        rng = stream(seed, chain, sweep, _ROWS_A)
        like_w = S / sigma2 + 1.0 / _KERNEL_VAR
        G = np.einsum("jk,ij,jl->ikl", B, inv_s, B)
        rhs = (S / sigma2) * (Ybar @ B) + (alpha - 1.0 / _KERNEL_VAR) * (V @ B)
        A = _draw_rows(G, like_w * (B.T @ B), alpha * lam1, rhs, rng)

        rng = stream(seed, chain, sweep, _ROWS_B)
        G = np.einsum("ik,ij,il->jkl", A, inv_s, A)
        rhs = (S / sigma2) * (Ybar.T @ A) + (alpha - 1.0 / _KERNEL_VAR) * (
            V.T @ A
        )
        B = _draw_rows(G, like_w * (A.T @ A), alpha * lam1, rhs, rng)

        theta = A @ B.T

        rng = stream(seed, chain, sweep, _SCALES)
        rate = max(alpha * lam2, _EPS_ABS)
        abs_theta = np.maximum(np.abs(theta), _EPS_ABS)
        inv_s = inverse_gaussian(rate / abs_theta, np.full_like(theta, rate**2), rng)

        rng = stream(seed, chain, sweep, _V2)
        mean = _KERNEL_VAR * alpha * theta - (theta + V1)
        V2 = truncated_normal(
            mean, math.sqrt(_KERNEL_VAR), -lam2, lam2, rng
        )

        rng = stream(seed, chain, sweep, _V1)
        buf = BufferedUniform(rng)
        coupling = alpha * 0.5 * (float(np.sum(A * A)) + float(np.sum(B * B)))
        atheta = (alpha * theta).ravel().tolist()
        c2 = (theta + V2).ravel().tolist()
        v1 = V1.ravel().tolist()
        r2 = math.fsum(x * x for x in v1)
        # bracket width from the chain's own coordinate scale; the fallback
        # covers the cold start where V1 is still zero
        rms = math.sqrt(r2 / max(len(v1), 1))
        width = min(10.0, max(4.0 * rms, 3.0 / (1.0 + coupling), 1e-9))
        inv_two_var = 1.0 / (2.0 * _KERNEL_VAR)
        for idx in range(len(v1)):
            x_old = v1[idx]
            r2_rest = max(r2 - x_old * x_old, 0.0)
            at = atheta[idx]
            cc = c2[idx]

            def logf(x):
                return (
                    at * x
                    - coupling * math.sqrt(r2_rest + x * x)
                    - (cc + x) * (cc + x) * inv_two_var
                )

            x_new = slice_sample_1d(logf, x_old, width, buf)
            v1[idx] = x_new
            r2 = r2_rest + x_new * x_new
        V1 = np.array(v1).reshape(p1, p2)

        rng = stream(seed, chain, sweep, _SIGMA)
        shape = a_sig + 0.5 * S * p1 * p2
        rate_sig = b_sig + 0.5 * (ss0 + S * float(np.sum((Ybar - theta) ** 2)))
        sigma2 = rate_sig / rng.standard_gamma(shape)

        rng = stream(seed, chain, sweep, _LAM2)
        abs_sum = float(np.sum(np.abs(theta)))
        floor = np.log(max(float(np.max(np.abs(V2))), 1e-300))

        def lam2_logf(ell):
            return -a_l2 * ell - b_l2 * np.exp(-ell) - alpha * abs_sum * np.exp(ell)

        lam2 = float(
            np.exp(
                slice_sample_1d(
                    lam2_logf, np.log(lam2), 1.0, rng, bounds=(floor, np.inf)
                )
            )
        )

        if sweep > config.warmup:
            k = sweep - config.warmup - 1
            if k % config.thinning == 0 and row < kept:
                state = ChainState(
                    latents={"A": A, "B": B},
                    duals={"V1": V1, "V2": V2},
                    scales={"inv_s": inv_s},
                    hypers={"sigma2": sigma2, "lam2": lam2},
                    rng_key=(seed, chain),
                )
                state.validate({"V2": lam2})
                sv = np.linalg.svd(theta, compute_uv=False)[:n_sv]
                draws[row] = np.concatenate(
                    [
                        A.ravel(),
                        B.ravel(),
                        V1.ravel(),
                        V2.ravel(),
                        [sigma2, float(np.linalg.norm(V1)), lam2],
                        sv,
                    ]
                )
                row += 1

    names = (
        flat_names("A", p1, r)
        + flat_names("B", p2, r)
        + flat_names("V1", p1, p2)
        + flat_names("V2", p1, p2)
        + ["sigma2", "lam1", "lam2"]
        + [f"sv_{k + 1}" for k in range(n_sv)]
    )
    meta = {
        "model": "gap_matrix_smoothing",
        "seed": seed,
        "chain_id": chain,
        "config_digest": config.digest(),
        "wall_seconds": time.perf_counter() - t0,
        "warmup": config.warmup,
        "retain": config.retain,
        "alpha": alpha,
        "rank": r,
    }
    return PosteriorSamples(draws[:row], names, meta)
