"""Random-variate primitives and reproducible counter-based streams.

Streams are Philox generators keyed by (seed, chain, sweep, block), so a
replication reproduces bit-for-bit regardless of how chains are scheduled
across workers, and a change in one block's draw count never shifts the
randomness of later blocks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, ndtri_exp

__all__ = [
    "stream",
    "sample_truncated_normal",
    "truncated_normal",
    "sample_inverse_gaussian",
    "inverse_gaussian",
    "slice_sample_1d",
]

_MASK16 = (1 << 16) - 1
_MASK32 = (1 << 32) - 1
_MASK64 = (1 << 64) - 1


def stream(seed, chain=0, sweep=0, block=0):
    """Generator for one (seed, chain, sweep, block) coordinate."""
    k0 = int(seed) & _MASK64
    k1 = ((int(chain) & _MASK16) << 48) | ((int(sweep) & _MASK32) << 16) | (
        int(block) & _MASK16
    )
    key = np.array([k0, k1], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# Beyond this many sigmas the plain CDF saturates in float64 and direct
# inverse-CDF sampling collapses; switch to the log-space tail inverse.
_TAIL = 5.0


def _tail_inverse(a, b, u):
    """Standard-normal draws on (a, b) with a >= _TAIL via the log-space
    complementary CDF, exact however deep or narrow the interval."""
    la = log_ndtr(-a)
    lb = log_ndtr(-b)
    ratio = np.exp(np.minimum(lb - la, 0.0))
    logt = la + np.log(ratio + u * (1.0 - ratio))
    return -ndtri_exp(logt)


def truncated_normal(mu, sigma, lo, hi, rng, size=None):
    """Exact draws from N(mu, sigma^2) restricted to (lo, hi), vectorized.

    Inverse-CDF in the bulk; once the whole interval sits more than 5 sigma
    into one tail, the complementary CDF is evaluated in log space so the
    inverse stays exact (a rejection scheme stalls on narrow far-tail
    intervals, which the samplers do produce).
    """
    mu, sigma, lo, hi = np.broadcast_arrays(
        np.asarray(mu, dtype=float),
        np.asarray(sigma, dtype=float),
        np.asarray(lo, dtype=float),
        np.asarray(hi, dtype=float),
    )
    if size is not None:
        mu, sigma, lo, hi = np.broadcast_arrays(
            mu, sigma, lo, hi, np.empty(size)
        )[:4]
    if np.any(lo >= hi):
        raise ValueError("lower bound must be below upper bound")
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")

    a = (lo - mu) / sigma
    b = (hi - mu) / sigma
    x = np.empty(a.shape)

    upper = a >= _TAIL
    lower = b <= -_TAIL
    mid = ~(upper | lower)

    u = rng.uniform(size=a.shape)
    if np.any(mid):
        am, bm = a[mid], b[mid]
        fa, fb = ndtr(am), ndtr(bm)
        uu = fa + u[mid] * (fb - fa)
        x[mid] = ndtri(np.clip(uu, 1e-300, 1.0 - 1e-16))
    if np.any(upper):
        x[upper] = _tail_inverse(a[upper], b[upper], u[upper])
    if np.any(lower):
        x[lower] = -_tail_inverse(-b[lower], -a[lower], u[lower])

    x = mu + sigma * x
    return np.clip(x, lo, hi)


def sample_truncated_normal(mu, sigma, lo, hi, rng):
    """One draw from N(mu, sigma^2) restricted to (lo, hi)."""
    if not lo < hi:
        raise ValueError("lower bound must be below upper bound")
    return float(truncated_normal(mu, sigma, lo, hi, rng, size=()))


def inverse_gaussian(mu, lam, rng, size=None):
    """Inverse-Gaussian draws (mean mu, shape lam), vectorized.

    Transform-with-rejection: solve the quadratic for the smaller root,
    then flip to mu^2 / x with probability x / (mu + x).
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(mu <= 0) or np.any(lam <= 0):
        raise ValueError("mu and lam must be positive")
    if size is None:
        size = np.broadcast_shapes(mu.shape, lam.shape)
    nu = rng.standard_normal(size) ** 2
    w = mu * nu
    x = mu * (1.0 + (w - np.sqrt(w * (4.0 * lam + w))) / (2.0 * lam))
    # cancellation can land exactly on zero for extreme nu
    x = np.maximum(x, 1e-300)
    flip = rng.uniform(size=size) * (mu + x) > mu
    return np.where(flip, mu * mu / x, x)


def sample_inverse_gaussian(mu, lam, rng):
    """One inverse-Gaussian draw with mean mu and shape lam."""
    return float(inverse_gaussian(float(mu), float(lam), rng, size=()))


def slice_sample_1d(logf, x0, width, rng, bounds=(-math.inf, math.inf),
                    max_stepout=256, max_shrink=2000):
    """One stepping-out-and-shrink slice update leaving exp(logf) invariant.

    bounds clip both the initial bracket and the step-out walk, so regions
    outside them are never proposed.  When the step-out budget binds, the
    randomized left/right split keeps the capped walk reversible.
    """
    lo, hi = bounds
    x0 = float(x0)
    fx0 = float(logf(x0))
    if not np.isfinite(fx0):
        raise ValueError("logf must be finite at the initial point")

    logy = fx0 + math.log(rng.uniform())
    r = rng.uniform()
    left = x0 - r * width
    right = left + width
    left = max(left, lo)
    right = min(right, hi)

    j = int(math.floor(max_stepout * rng.uniform()))
    k = max_stepout - 1 - j
    while j > 0 and left > lo and logf(left) > logy:
        left = max(left - width, lo)
        j -= 1
    while k > 0 and right < hi and logf(right) > logy:
        right = min(right + width, hi)
        k -= 1

    for _ in range(max_shrink):
        x1 = left + rng.uniform() * (right - left)
        if logf(x1) > logy:
            return x1
        if x1 < x0:
            left = x1
        else:
            right = x1
    raise RuntimeError("slice sampler failed to find an acceptable point")


class BufferedUniform:
    """Uniform(0,1) source drawing from the generator in blocks; drop-in for
    hot scalar loops where per-call generator overhead dominates."""

    def __init__(self, rng, block=8192):
        self._rng = rng
        self._block = block
        self._buf = rng.uniform(size=block)
        self._pos = 0

    def uniform(self):
        if self._pos >= self._buf.size:
            self._buf = self._rng.uniform(size=self._block)
            self._pos = 0
        value = self._buf[self._pos]
        self._pos += 1
        return value
