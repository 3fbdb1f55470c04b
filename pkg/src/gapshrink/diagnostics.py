"""Chain-quality diagnostics: autocorrelation, effective sample size,
posterior summaries, and singular-value posterior tracks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "acf",
    "ess",
    "ess_from_acf",
    "singular_value_posterior",
    "SingularValueSummary",
    "ChainSummary",
    "summarize_series",
]

# ESS of an antithetic chain exceeds n; estimates are capped at this
# multiple of n and flagged rather than reported raw.
ESS_CAP = 1.05


def acf(series, max_lag):
    """Autocorrelation at lags 0..max_lag, biased autocovariance estimator
    normalized by lag zero (so acf[0] is exactly 1)."""
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if n <= max_lag:
        raise ValueError("series must be longer than max_lag")
    x = x - x.mean()
    var = float(x @ x)
    if var == 0.0:
        raise ValueError("autocorrelation of a constant series is undefined")
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    cov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return cov / cov[0]


def ess_from_acf(rho, n):
    """ESS n / (1 + 2 sum rho_k), truncated by the initial-positive-sequence
    rule: stop before the first adjacent pair (rho_2m, rho_2m+1) with a
    nonpositive sum.  Returns (ess, capped)."""
    rho = np.asarray(rho, dtype=float).ravel()
    tau = -1.0
    m = 0
    while 2 * m + 1 < rho.size:
        pair = rho[2 * m] + rho[2 * m + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
        m += 1
    if tau <= 0.0:
        return ESS_CAP * n, True
    raw = n / tau
    if raw > ESS_CAP * n:
        return ESS_CAP * n, True
    return raw, False


def ess(series):
    """Autocorrelation-adjusted effective sample size of one chain."""
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if n < 100:
        raise ValueError("need at least 100 draws for an ESS estimate")
    value, _ = ess_from_acf(acf(x, n - 1), n)
    return value


@dataclass
class SingularValueSummary:
    """Per-draw descending singular values with posterior mean/quantiles."""

    draws: np.ndarray
    mean: np.ndarray
    q025: np.ndarray
    q50: np.ndarray
    q975: np.ndarray


def singular_value_posterior(A_draws, B_draws):
    """Singular values of A B^T for every retained draw, sorted descending."""
    A_draws = np.asarray(A_draws, dtype=float)
    B_draws = np.asarray(B_draws, dtype=float)
    if A_draws.shape[0] != B_draws.shape[0]:
        raise ValueError("A and B draw counts differ")
    if A_draws.shape[2] != B_draws.shape[2]:
        raise ValueError("A and B disagree on factor rank")
    out = np.empty((A_draws.shape[0], min(A_draws.shape[1], B_draws.shape[1])))
    for i in range(A_draws.shape[0]):
        s = np.linalg.svd(A_draws[i] @ B_draws[i].T, compute_uv=False)
        out[i] = np.sort(s)[::-1]
    return SingularValueSummary(
        draws=out,
        mean=out.mean(axis=0),
        q025=np.quantile(out, 0.025, axis=0),
        q50=np.quantile(out, 0.5, axis=0),
        q975=np.quantile(out, 0.975, axis=0),
    )


@dataclass
class ChainSummary:
    """Per-parameter posterior summary plus timing."""

    names: list
    mean: np.ndarray
    sd: np.ndarray
    q025: np.ndarray
    q50: np.ndarray
    q975: np.ndarray
    ess: np.ndarray
    acf: np.ndarray
    wall_seconds: float = 0.0
    ess_per_second: np.ndarray = field(default=None)


def summarize_series(draws, names, wall_seconds=0.0, max_lag=30):
    """Column-wise ChainSummary of a draws matrix (rows are iterations)."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    n, k = draws.shape
    max_lag = min(max_lag, n - 1)
    means = draws.mean(axis=0)
    sds = draws.std(axis=0, ddof=1)
    q = np.quantile(draws, [0.025, 0.5, 0.975], axis=0)
    ess_vals = np.empty(k)
    acfs = np.empty((k, max_lag + 1))
    for j in range(k):
        col = draws[:, j]
        if col.std() == 0.0:
            ess_vals[j] = np.nan
            acfs[j] = np.nan
            acfs[j, 0] = 1.0
            continue
        rho = acf(col, n - 1)
        acfs[j] = rho[: max_lag + 1]
        ess_vals[j], _ = ess_from_acf(rho, n)
    eps = (
        ess_vals / wall_seconds if wall_seconds > 0 else np.full(k, np.nan)
    )
    return ChainSummary(
        names=list(names),
        mean=means,
        sd=sds,
        q025=q[0],
        q50=q[1],
        q975=q[2],
        ess=ess_vals,
        acf=acfs,
        wall_seconds=wall_seconds,
        ess_per_second=eps,
    )
