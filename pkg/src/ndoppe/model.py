"""The NDOPPE family: a finite mixture of negative binomials NB(k, theta), k = 1..r.

PMF  f(x) = h(theta) p(x) (1 - theta)^x  with
     p(x) = sum_k a_{k-1} (k-1)! C(x+k-1, x)  and
     1/h(theta) = sum_k a_{k-1} (k-1)! / theta^k.

Component k of the mixture carries weight h(theta) a_{k-1} (k-1)! / theta^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .specfun import (
    LOG_ZERO,
    log_binomial_array,
    log_sum_exp_array,
    reg_inc_beta,
    reg_inc_beta_upper,
)

TAIL_MASS = 1e-12
MAX_SERIES_TERMS = 10_000_000


class SeriesTruncationError(ArithmeticError):
    """An adaptive series hit its hard term cap before the tail was small enough."""


@dataclass(frozen=True)
class ModelSpec:
    """Family order r and nonnegative coefficients (a_0, ..., a_{r-1})."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 1:
            raise ValueError("need at least one coefficient (r >= 1)")
        if any(not math.isfinite(a) or a < 0 for a in coeffs):
            raise ValueError(f"coefficients must be finite and nonnegative: {coeffs}")
        if coeffs[-1] <= 0:
            raise ValueError(f"trailing coefficient a_(r-1) must be positive: {coeffs}")

    @classmethod
    def ndl(cls) -> "ModelSpec":
        """Natural discrete Lindley: r = 2, a = (1, 1)."""
        return cls((1.0, 1.0))

    @classmethod
    def geometric(cls) -> "ModelSpec":
        return cls((1.0,))

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @cached_property
    def log_g(self) -> np.ndarray:
        """ln(a_{k-1} (k-1)!) for k = 1..r; -inf where a_{k-1} = 0."""
        a = np.asarray(self.coefficients)
        k = np.arange(1, self.order + 1)
        with np.errstate(divide="ignore"):
            return np.log(a) + np.array([math.lgamma(j) for j in k])


@dataclass(frozen=True)
class Theta:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not 0.0 < v < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.value!r}")
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value


ThetaLike = Union[Theta, float]


def _theta(theta: ThetaLike) -> float:
    if isinstance(theta, Theta):
        return theta.value
    return Theta(theta).value


def _log_component_terms(theta, model: ModelSpec) -> np.ndarray:
    # ln(a_{k-1} (k-1)! / theta^k); broadcasts over an array of theta on axis 0
    th = np.asarray(theta, dtype=float)[..., None]
    k = np.arange(1, model.order + 1)
    return model.log_g - k * np.log(th)


def log_normalizer(theta: ThetaLike, model: ModelSpec) -> float:
    """ln h(theta)."""
    return -float(log_sum_exp_array(_log_component_terms(_theta(theta), model)))


def normalizer(theta: ThetaLike, model: ModelSpec) -> float:
    return math.exp(log_normalizer(theta, model))


def weight_poly(x, model: ModelSpec):
    """ln p(x), vectorized over x."""
    x = np.asarray(x)
    k = np.arange(1, model.order + 1)
    terms = model.log_g + log_binomial_array(x[..., None] + k - 1, x[..., None])
    out = log_sum_exp_array(terms)
    return float(out) if out.ndim == 0 else out


def log_mixture_weights(theta, model: ModelSpec) -> np.ndarray:
    terms = _log_component_terms(theta, model)
    return terms - log_sum_exp_array(terms)[..., None]


def mixture_weights(theta: ThetaLike, model: ModelSpec) -> np.ndarray:
    """Mixing probabilities of NB(1, theta), ..., NB(r, theta)."""
    return np.exp(log_mixture_weights(_theta(theta), model))


def log_pmf(x, theta: ThetaLike, model: ModelSpec):
    """ln f(x); -inf for negative x. Vectorized over x."""
    th = _theta(theta)
    x = np.asarray(x)
    xs = np.maximum(x, 0)
    out = log_normalizer(th, model) + weight_poly(xs, model) + xs * math.log1p(-th)
    out = np.where(x < 0, LOG_ZERO, out)
    return float(out) if out.ndim == 0 else out


def pmf(x, theta: ThetaLike, model: ModelSpec):
    out = np.exp(log_pmf(x, theta, model))
    return float(out) if np.ndim(out) == 0 else out


def cdf(x: int, theta: ThetaLike, model: ModelSpec) -> float:
    """P(X <= x) = sum_k w_k I_theta(k, x + 1)."""
    th = _theta(theta)
    if x < 0:
        return 0.0
    w = mixture_weights(th, model)
    total = math.fsum(wk * reg_inc_beta(k, x + 1, th) for k, wk in enumerate(w, 1) if wk > 0)
    return min(total, 1.0)


def survival(x: int, theta: ThetaLike, model: ModelSpec) -> float:
    """P(X > x), computed directly so that tiny tails keep their precision."""
    th = _theta(theta)
    if x < 0:
        return 1.0
    w = mixture_weights(th, model)
    return math.fsum(wk * reg_inc_beta_upper(k, x + 1, th) for k, wk in enumerate(w, 1) if wk > 0)


def mean(theta, model: ModelSpec):
    """E[X] = (1 - theta)/theta * sum_k k w_k(theta). Accepts an array of theta."""
    th = np.asarray(theta.value if isinstance(theta, Theta) else theta, dtype=float)
    w = np.exp(log_mixture_weights(th, model))
    k = np.arange(1, model.order + 1)
    out = (1.0 - th) / th * np.sum(k * w, axis=-1)
    return float(out) if out.ndim == 0 else out


def nb_upper_bound(shape: int, theta: float, tail: float = TAIL_MASS) -> int:
    """Smallest t with P(NB(shape, theta) > t) < tail.

    Any mixture of NB(m, theta) with m <= shape is stochastically smaller, so
    the same bound truncates it with at most ``tail`` mass left over.
    """
    def upper(t):
        return reg_inc_beta_upper(shape, t + 1, theta)

    lo, hi = -1, max(1, int(shape * (1 - theta) / theta))
    while upper(hi) >= tail:
        lo = hi
        hi *= 2
        if hi > MAX_SERIES_TERMS:
            raise SeriesTruncationError(
                f"NB({shape}, {theta}) tail still >= {tail} past {MAX_SERIES_TERMS} terms"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if upper(mid) < tail:
            hi = mid
        else:
            lo = mid
    return hi


def support_bound(theta: ThetaLike, model: ModelSpec, tail: float = TAIL_MASS) -> int:
    """Adaptive truncation point X*: first x with P(X > x) < tail."""
    th = _theta(theta)
    hi = nb_upper_bound(model.order, th, tail)
    lo = -1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if survival(mid, th, model) < tail:
            hi = mid
        else:
            lo = mid
    return hi


def pmf_table(theta: ThetaLike, model: ModelSpec, x_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, pmf, cdf) rows for x = 0..x_max."""
    x = np.arange(x_max + 1)
    f = np.atleast_1d(pmf(x, theta, model))
    F = np.array([cdf(int(v), theta, model) for v in x])
    return x, f, F
