"""Seeded NDOPPE variate generation.

Each draw first picks a mixture component k by inverting the cumulative
mixture weights, then draws NB(k, theta) as a sum of k geometric variates
obtained by inversion, floor(ln U / ln(1 - theta)).

Uniforms come from numpy's PCG64 bit generator seeded through
``SeedSequence(seed, spawn_key=(stream_index,))``; the stream for a given
(seed, stream_index) is fixed across platforms and numpy releases that keep
the PCG64 / SeedSequence contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelSpec, ThetaLike, _theta, mixture_weights


@dataclass
class SeededStream:
    """One independent uniform substream. Not meant to be shared across threads."""

    seed: int
    stream_index: int = 0
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        self._rng = np.random.Generator(np.random.PCG64(ss))

    def uniform(self, size=None):
        """Uniform draws on (0, 1]."""
        return 1.0 - self._rng.random(size)


def cumulative_weights(theta: ThetaLike, model: ModelSpec) -> np.ndarray:
    w = np.cumsum(mixture_weights(theta, model))
    w[-1] = 1.0
    return w


def sample_component(u, theta: ThetaLike, model: ModelSpec):
    """Component k in 1..r with W_{k-1} < u <= W_k (vectorized over u)."""
    k = np.searchsorted(cumulative_weights(theta, model), u, side="left") + 1
    return int(k) if np.ndim(k) == 0 else k


def _geometric(u, theta: float):
    return np.floor(np.log(u) / math.log1p(-theta)).astype(np.int64)


def sample_nb(k: int, theta: ThetaLike, stream: SeededStream, size=None):
    """Failures before the k-th success; k = 1 is the geometric on {0, 1, ...}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    th = _theta(theta)
    if size is None:
        return int(_geometric(stream.uniform(k), th).sum())
    u = stream.uniform((int(np.prod(size)), k))
    return _geometric(u, th).sum(axis=1).reshape(size)


def sample(n: int, theta: ThetaLike, model: ModelSpec, stream: SeededStream) -> np.ndarray:
    """n independent NDOPPE draws as an int64 array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    th = _theta(theta)
    return _sample(n, th, cumulative_weights(th, model), stream)


def _sample(n: int, th: float, cum_weights: np.ndarray, stream: SeededStream) -> np.ndarray:
    comps = np.searchsorted(cum_weights, stream.uniform(n), side="left") + 1
    geo = _geometric(stream.uniform(int(comps.sum())), th)
    starts = np.concatenate(([0], np.cumsum(comps)[:-1]))
    return np.add.reduceat(geo, starts)
