"""Point estimation from a sample: MLE of theta and UMVUEs of the PMF and CDF.

The UMVUEs condition on the complete sufficient statistic T = X_1 + ... + X_n.
Sums over component compositions (y_1, ..., y_r) only enter through
c(n, y) and the degree m = sum k y_k, so they are carried as the coefficients
of g(z)^n with g(z) = sum_k a_{k-1} (k-1)! z^k.  With those,

    A_n(t)     = sum_m [z^m] g^n * C(t + m - 1, t)
    P(T = t)   = h(theta)^n (1 - theta)^t A_n(t)
    fhat(x|t)  = p(x) A_{n-1}(t - x) / A_n(t),    0 <= x <= t.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import model as _model
from .model import ModelSpec, Theta, ThetaLike, _theta
from .specfun import LOG_ZERO, log_binomial_array, log_sum_exp_array

THETA_BRACKET = (1e-9, 1.0 - 1e-9)
BRACKET_WIDTH = 1e-12
# rows x degrees processed at once by the A_n(t) kernels
_CHUNK_ELEMENTS = 4_000_000


class DegenerateSampleError(ValueError):
    """All-zero sample: the MLE sits on the boundary theta = 1."""


class RootBracketError(ArithmeticError):
    pass


class ZeroProbabilityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Sample:
    """Observed counts with their sufficient statistic."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("a sample needs at least one observation")
        if not np.issubdtype(v.dtype, np.integer):
            if not np.all(v == np.floor(v)):
                raise ValueError("sample values must be integers")
        v = v.astype(np.int64)
        if (v < 0).any():
            raise ValueError("sample values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def t(self) -> int:
        return int(self.values.sum())

    @property
    def mean(self) -> float:
        return self.t / self.n


# ---------------------------------------------------------------- MLE


def _solve_mean(xbar, model: ModelSpec) -> np.ndarray:
    """Vectorized root of mean(theta) = xbar on THETA_BRACKET.

    mean(theta) is strictly decreasing, so plain bisection keeps the bracket;
    one secant step across the final bracket polishes the root.
    """
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    lo = np.full(xbar.shape, THETA_BRACKET[0])
    hi = np.full(xbar.shape, THETA_BRACKET[1])
    f_lo = _model.mean(lo, model) - xbar
    f_hi = _model.mean(hi, model) - xbar
    bad = ~((f_lo >= 0) & (f_hi <= 0))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise RootBracketError(
            f"mean(theta) = {xbar[i]!r} not bracketed on {THETA_BRACKET}: "
            f"mean(lo) - xbar = {f_lo[i]!r}, mean(hi) - xbar = {f_hi[i]!r}"
        )
    while np.any(hi - lo > BRACKET_WIDTH):
        mid = 0.5 * (lo + hi)
        f_mid = _model.mean(mid, model) - xbar
        right = f_mid > 0
        lo = np.where(right, mid, lo)
        f_lo = np.where(right, f_mid, f_lo)
        hi = np.where(right, hi, mid)
        f_hi = np.where(right, f_hi, f_mid)
    denom = f_lo - f_hi
    with np.errstate(invalid="ignore", divide="ignore"):
        step = np.where(denom > 0, f_lo / denom, 0.5)
    return lo + np.clip(step, 0.0, 1.0) * (hi - lo)


def mle_theta(sample: Sample, model: ModelSpec) -> Theta:
    """Solve the score equation mean(theta) = sample mean."""
    if sample.t == 0:
        raise DegenerateSampleError("sample mean is 0; the MLE of theta is on the boundary theta = 1")
    return Theta(float(_solve_mean(sample.mean, model)[0]))


def mle_theta_batch(means, model: ModelSpec) -> np.ndarray:
    """MLE of theta for many sample means at once (all must be > 0)."""
    means = np.asarray(means, dtype=float)
    if (means <= 0).any():
        raise DegenerateSampleError("all sample means must be positive")
    return _solve_mean(means, model)


# ---------------------------------------------------- composition sums


@dataclass(frozen=True, eq=False)
class LogPolyPower:
    """Log coefficients of g(z)^n on degrees n .. r*n."""

    n: int
    order: int
    coeffs: np.ndarray

    @property
    def min_degree(self) -> int:
        return self.n

    @property
    def max_degree(self) -> int:
        return self.order * self.n

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(self.min_degree, self.max_degree + 1)

    def __getitem__(self, m: int) -> float:
        if not self.min_degree <= m <= self.max_degree:
            raise KeyError(m)
        return float(self.coeffs[m - self.min_degree])

    def as_dict(self) -> dict[int, float]:
        return {int(m): float(c) for m, c in zip(self.degrees, self.coeffs)}


def _xlogy(y, logx):
    # y * log(x) with 0 * log(0) = 0
    with np.errstate(invalid="ignore"):
        return np.where(y == 0, 0.0, y * logx)


def _power_closed_form(n: int, model: ModelSpec) -> np.ndarray:
    # r <= 2: exactly one composition per degree, y_2 = m - n, y_1 = 2n - m
    lg = model.log_g
    if model.order == 1:
        return np.array([n * lg[0]])
    y2 = np.arange(0, n + 1)
    y1 = n - y2
    return log_binomial_array(n, y2) + _xlogy(y1, lg[0]) + _xlogy(y2, lg[1])


def _power_by_convolution(n: int, model: ModelSpec) -> np.ndarray:
    r = model.order
    lg = model.log_g
    cur = lg.copy()
    for j in range(2, n + 1):
        # degrees j .. r*j; term k shifts the previous power (degrees j-1 .. r(j-1)) by k
        width = (r - 1) * j + 1
        stack = np.full((r, width), LOG_ZERO)
        for k in range(1, r + 1):
            stack[k - 1, k - 1 : k - 1 + cur.size] = cur + lg[k - 1]
        cur = log_sum_exp_array(stack, axis=0)
    return cur


@lru_cache(maxsize=256)
def _power_coeffs(n: int, model: ModelSpec) -> np.ndarray:
    if n == 0:
        out = np.zeros(1)
    elif model.order <= 2:
        out = _power_closed_form(n, model)
    else:
        out = _power_by_convolution(n, model)
    out.setflags(write=False)
    return out


def log_poly_power(n: int, model: ModelSpec) -> LogPolyPower:
    """ln [z^m] g(z)^n for m = n .. r n (n = 0 gives the constant 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return LogPolyPower(n=n, order=model.order, coeffs=_power_coeffs(n, model))


def _log_a(n: int, s, model: ModelSpec) -> np.ndarray:
    """ln A_n(s) over an integer array s; -inf for s < 0."""
    s = np.asarray(s, dtype=np.int64)
    shape = s.shape
    s = s.ravel()
    power = log_poly_power(n, model)
    m = power.degrees
    out = np.full(s.size, LOG_ZERO)
    valid = np.flatnonzero(s >= 0)
    rows = max(1, _CHUNK_ELEMENTS // m.size)
    for start in range(0, valid.size, rows):
        idx = valid[start : start + rows]
        sv = s[idx][:, None]
        terms = power.coeffs + log_binomial_array(sv + m - 1, sv)
        out[idx] = log_sum_exp_array(terms, axis=1)
    return out.reshape(shape)


def a_n_t(n: int, t: int, model: ModelSpec) -> float:
    """ln A_n(t)."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    return float(_log_a(n, t, model))


def log_sum_statistic_pmf(t, n: int, theta: ThetaLike, model: ModelSpec):
    th = _theta(theta)
    t = np.asarray(t)
    out = n * _model.log_normalizer(th, model) + np.maximum(t, 0) * math.log1p(-th) + _log_a(n, t, model)
    return float(out) if out.ndim == 0 else out


def sum_statistic_pmf(t, n: int, theta: ThetaLike, model: ModelSpec):
    """P(T = t) for T the sum of n iid draws."""
    out = np.exp(log_sum_statistic_pmf(t, n, theta, model))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- UMVUE


def log_umvue_pmf(x, n: int, t, model: ModelSpec):
    """ln fhat(x | n, t), broadcasting x against t. -inf where x > t or x < 0."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=np.int64), np.asarray(t, dtype=np.int64))
    xs = np.maximum(x, 0)
    out = _model.weight_poly(xs, model) + _log_a(n - 1, t - xs, model) - _log_a(n, t, model)
    out = np.where((x < 0) | (x > t), LOG_ZERO, out)
    return float(out) if out.ndim == 0 else out


def umvue_pmf(x, n: int, t, model: ModelSpec):
    """Unbiased, minimum-variance estimate of f(x) given n draws summing to t.

    n = 1 is allowed but degenerate: it returns the indicator 1{x = t}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        warnings.warn("UMVUE with n = 1 is the indicator 1{x = t}", stacklevel=2)
    out = np.exp(log_umvue_pmf(x, n, t, model))
    return float(out) if np.ndim(out) == 0 else out


def conditional_pmf(x, t, n: int, model: ModelSpec):
    """P(X_1 = x | T = t); free of theta and equal to the UMVUE of f(x)."""
    out = np.exp(log_umvue_pmf(x, n, t, model))
    return float(out) if np.ndim(out) == 0 else out


def umvue_cdf_table(x_max: int, n: int, t, model: ModelSpec) -> np.ndarray:
    """Fhat(x | n, t) for x = 0..x_max as the running sum of fhat.

    ``t`` may be an array; the result then has shape (len(t), x_max + 1).
    Entries with x >= t are exactly 1.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.int64))
    w = np.arange(x_max + 1)
    f = np.exp(log_umvue_pmf(w[None, :], n, t[:, None], model))
    F = np.cumsum(f, axis=1)
    F = np.where(w[None, :] >= t[:, None], 1.0, np.minimum(F, 1.0))
    return F


def umvue_cdf(x: int, n: int, t: int, model: ModelSpec) -> float:
    """Unbiased estimate of F(x): cumulative UMVUE of the PMF."""
    if x < 0:
        return 0.0
    if x >= t:
        return 1.0
    return float(umvue_cdf_table(x, n, t, model)[0, x])


def umvue_cdf_alt(x: int, n: int, t: int, model: ModelSpec) -> float:
    """Alternative CDF estimate with C(t + m - 1, t - w) inside the sum.

    Kept only for comparison with the cumulative estimator; it is not unbiased.
    """
    if x < 0:
        return 0.0
    power = log_poly_power(n - 1, model)
    w = np.arange(0, min(x, t) + 1)
    m = power.degrees
    terms = (
        _model.weight_poly(w, model)[:, None]
        + power.coeffs[None, :]
        + log_binomial_array(t + m[None, :] - 1, t - w[:, None])
    )
    return float(np.exp(log_sum_exp_array(terms.ravel()) - _log_a(n, t, model)))


# ---------------------------------------------------------- likelihood


def log_likelihood(sample: Sample, pmf_values: Callable) -> float:
    """sum_i ln pmf_values(x_i); pmf_values is evaluated once per distinct value."""
    xs, counts = np.unique(sample.values, return_counts=True)
    total = []
    for x, c in zip(xs, counts):
        p = float(pmf_values(int(x)))
        if not p > 0:
            raise ZeroProbabilityError(f"observation x={int(x)} has probability {p!r}")
        total.append(c * math.log(p))
    return math.fsum(total)
