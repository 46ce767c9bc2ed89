"""Log-space primitives and special functions.

Everything downstream works with logarithms of nonnegative quantities;
``-inf`` stands for an exact zero and NaN is never produced for valid input.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy.special import betaln, gammaln

LOG_ZERO = float("-inf")

# math.comb stays fast well past this; above it lgamma differences are used.
_EXACT_BINOMIAL_LIMIT = 10_000

_CF_MAX_ITER = 100_000
_CF_EPS = 1e-16
_CF_TINY = 1e-300


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


def log_gamma(z: float) -> float:
    """ln Gamma(z) for z > 0."""
    if not z > 0:
        raise DomainError(f"log_gamma requires z > 0, got {z!r}")
    return math.lgamma(z)


def log_binomial(upper: int, lower: int) -> float:
    """ln C(upper, lower) with the generalized conventions used by the estimators.

    C(a, 0) = 1 for every a >= -1 (so C(-1, 0) = 1), and C(a, b) = 0 when
    0 <= a < b.
    """
    if lower < 0:
        raise DomainError(f"lower must be >= 0, got {lower}")
    if upper < -1:
        raise DomainError(f"upper must be >= -1, got {upper}")
    if lower == 0:
        return 0.0
    if upper < lower:
        return LOG_ZERO
    if upper <= _EXACT_BINOMIAL_LIMIT:
        return math.log(math.comb(upper, lower))
    return math.lgamma(upper + 1) - math.lgamma(lower + 1) - math.lgamma(upper - lower + 1)


def log_binomial_array(upper, lower) -> np.ndarray:
    """Vectorized :func:`log_binomial` over broadcast integer arrays.

    Inputs are assumed already validated (lower >= 0, upper >= -1).
    """
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper, lower = np.broadcast_arrays(upper, lower)
    out = np.full(upper.shape, LOG_ZERO)
    zero = lower == 0
    out[zero] = 0.0
    ok = (~zero) & (upper >= lower)
    u, l = upper[ok], lower[ok]
    out[ok] = gammaln(u + 1) - gammaln(l + 1) - gammaln(u - l + 1)
    return out


def log_sum_exp(terms: Iterable[float]) -> float:
    """ln sum(exp(t)) with a max shift; an empty sequence gives -inf."""
    xs = list(terms)
    if not xs:
        return LOG_ZERO
    top = max(xs)
    if top == LOG_ZERO or math.isinf(top):
        return top
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


def log_sum_exp_array(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Stable log-sum-exp along ``axis``; all -inf slices reduce to -inf."""
    a = np.asarray(a, dtype=float)
    top = np.max(a, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        s = np.log(np.sum(np.exp(a - safe), axis=axis, keepdims=True))
    out = np.where(np.isfinite(top), s + safe, top)
    return np.squeeze(out, axis=axis)


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Continued fraction on whichever side of x = a / (a + b) converges fastest,
    mapped through I_x(a, b) = 1 - I_{1-x}(b, a).
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"reg_inc_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x <= a / (a + b):
        log_front = a * math.log(x) + b * math.log1p(-x) - float(betaln(a, b))
        return min(1.0, math.exp(log_front) * _beta_cf(a, b, x) / a)
    y = 1.0 - x
    log_front = b * math.log(y) + a * math.log(x) - float(betaln(b, a))
    return max(0.0, 1.0 - math.exp(log_front) * _beta_cf(b, a, y) / b)


def reg_inc_beta_upper(a: float, b: float, x: float) -> float:
    """Complement 1 - I_x(a, b), accurate when it is tiny."""
    return reg_inc_beta(b, a, 1.0 - x)
