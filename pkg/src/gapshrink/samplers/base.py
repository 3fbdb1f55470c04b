"""Shared sampler configuration, chain state, and draw storage."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SamplerConfig",
    "ChainState",
    "PosteriorSamples",
    "DEFAULT_HYPERPRIORS",
]

# (shape, rate/scale) pairs for inverse-gamma priors, (a, b) for the beta
# prior on the cross-group weight, and the gamma hyperprior of the
# double-Pareto comparator.
DEFAULT_HYPERPRIORS = {
    "lam": (2.0, 1.0),
    "lam2": (2.0, 1.0),
    "sigma2": (2.0, 1.0),
    "rho": (2.0, 1.0),
    "omega_cross": (1.0, 1.0),
    "gdp": (1.0, 1.0),
}


@dataclass
class SamplerConfig:
    """Run-length, seed, shrinkage strength, and hyperprior settings.

    Identical configs produce bit-identical chains: all randomness flows
    through counter-based streams keyed by (seed, chain_id, sweep, block).
    """

    warmup: int = 1000
    retain: int = 1000
    seed: int = 0
    alpha: float = 1000.0
    thinning: int = 1
    chain_id: int = 0
    rank: int = 5
    random_intercept: bool = False
    hyperpriors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.warmup < 1 or self.retain < 1:
            raise ValueError("warmup and retain must be at least 1")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        merged = dict(DEFAULT_HYPERPRIORS)
        merged.update(self.hyperpriors)
        self.hyperpriors = merged

    def digest(self):
        payload = {
            "warmup": self.warmup,
            "retain": self.retain,
            "seed": self.seed,
            "alpha": self.alpha,
            "thinning": self.thinning,
            "chain_id": self.chain_id,
            "rank": self.rank,
            "random_intercept": self.random_intercept,
            "hyperpriors": {k: list(v) if isinstance(v, tuple) else v
                            for k, v in sorted(self.hyperpriors.items())},
        }
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode()
        ).hexdigest()[:16]


@dataclass
class ChainState:
    """All latent quantities of one Gibbs chain at a sweep boundary.

    latents holds the model block (theta, or the factor pair), duals the
    box-constrained dual block, scales the mixture augmentations (stored
    as precisions, so positivity is the invariant), hypers the scalar
    hyperparameters.  rng_key records the (seed, chain) coordinates of the
    counter-based streams driving the chain.
    """

    latents: dict
    duals: dict
    scales: dict
    hypers: dict
    rng_key: tuple

    def validate(self, dual_bounds):
        """Check the state invariants: augmentation scales strictly
        positive, every dual block inside its current box."""
        for name, arr in self.scales.items():
            if not np.all(np.asarray(arr) > 0.0):
                raise ValueError(f"augmentation scale {name!r} not positive")
        for name, bound in dual_bounds.items():
            arr = np.asarray(self.duals[name])
            if arr.size and np.max(np.abs(arr)) > bound * (1 + 1e-12) + 1e-12:
                raise ValueError(
                    f"dual block {name!r} violates its bound {bound:g}"
                )


@dataclass
class PosteriorSamples:
    """Retained draws as a (iterations x parameters) matrix with labels."""

    draws: np.ndarray
    names: list
    meta: dict

    def __post_init__(self):
        self.draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if self.draws.shape[1] != len(self.names):
            raise ValueError("column count does not match names")
        self._index = {name: j for j, name in enumerate(self.names)}

    def column(self, name):
        return self.draws[:, self._index[name]]

    def columns(self, prefix):
        """All columns whose name starts with prefix, in declared order."""
        cols = [j for j, n in enumerate(self.names) if n.startswith(prefix)]
        return self.draws[:, cols]

    def mean(self, prefix):
        return self.columns(prefix).mean(axis=0)


def flat_names(prefix, *dims):
    """Labels like prefix_i or prefix_i_j for flattened parameter blocks."""
    if len(dims) == 1:
        return [f"{prefix}_{i}" for i in range(dims[0])]
    if len(dims) == 2:
        return [
            f"{prefix}_{i}_{j}" for i in range(dims[0]) for j in range(dims[1])
        ]
    raise ValueError("only 1- and 2-d blocks supported")
