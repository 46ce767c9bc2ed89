"""Mean squared error of the PMF/CDF estimators.

The UMVUEs are unbiased, so their MSE is a variance that can be summed
exactly over the law of T.  The plug-in MLEs have no closed-form MSE and are
handled by Monte Carlo alongside the UMVUEs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import model as _model
from .estimate import _log_a, mle_theta_batch
from .model import ModelSpec, Theta, ThetaLike, _log_component_terms, _theta, nb_upper_bound
from .sampler import SeededStream, _sample, cumulative_weights
from .specfun import log_sum_exp_array

ESTIMATORS = ("MLE", "UMVUE")
TARGETS = ("PMF", "CDF")
DEFAULT_SIZES = (25, 50, 100, 200, 400)
DEGENERATE_POLICIES = ("boundary", "redraw")


@dataclass(frozen=True)
class MseStudyConfig:
    model: ModelSpec
    theta: Theta
    x: int
    sample_sizes: tuple[int, ...] = DEFAULT_SIZES
    replications: int = 1000
    master_seed: int = 0
    # all-zero samples: "boundary" keeps them and uses the theta -> 1 limit of
    # the MLE (point mass at 0); "redraw" replaces them from spare substreams
    degenerate: str = "boundary"

    def __post_init__(self):
        if not isinstance(self.theta, Theta):
            object.__setattr__(self, "theta", Theta(self.theta))
        sizes = tuple(int(n) for n in self.sample_sizes)
        object.__setattr__(self, "sample_sizes", sizes)
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"sample_sizes must be strictly increasing: {sizes}")
        if sizes[0] < 2:
            raise ValueError("sample sizes must be >= 2")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.x < 0:
            raise ValueError("x must be nonnegative")
        if self.degenerate not in DEGENERATE_POLICIES:
            raise ValueError(f"degenerate must be one of {DEGENERATE_POLICIES}")


@dataclass(frozen=True)
class MsePoint:
    n: int
    mse: float
    std_error: float
    mean_estimate: float = math.nan
    mean_std_error: float = math.nan
    degenerate: int = 0


@dataclass
class MseCurve:
    estimator: str
    target: str
    points: list[MsePoint] = field(default_factory=list)

    @property
    def sizes(self) -> list[int]:
        return [p.n for p in self.points]

    @property
    def mse(self) -> np.ndarray:
        return np.array([p.mse for p in self.points])


# ------------------------------------------------------------ exact series


def _umvue_over_t(x: int, n: int, theta: float, model: ModelSpec, cumulative: bool):
    """Estimator value and P(T = t) on t = 0..t_hi, with P(T > t_hi) < 1e-12."""
    t_hi = nb_upper_bound(model.order * n, theta)
    t = np.arange(t_hi + 1)
    log_an = _log_a(n, t, model)
    log_ft = n * _model.log_normalizer(theta, model) + t * math.log1p(-theta) + log_an
    # A_{n-1}(s) for every s = t - w needed below
    log_an1 = _log_a(n - 1, np.arange(t_hi + 1), model)
    w = np.arange(x + 1)
    s = t[:, None] - w[None, :]
    log_terms = _model.weight_poly(w, model)[None, :] + np.where(s >= 0, log_an1[np.maximum(s, 0)], -np.inf)
    est = np.exp(log_terms - log_an[:, None])
    if cumulative:
        value = np.where(t <= x, 1.0, np.minimum(est.sum(axis=1), 1.0))
    else:
        value = est[:, x]
    return value, np.exp(log_ft)


def umvue_moments(x: int, n: int, theta: ThetaLike, model: ModelSpec, cumulative: bool = False):
    """(E[est], E[(est - truth)^2]) for the UMVUE of f(x) or F(x), summed over T."""
    if n < 2:
        raise ValueError("n must be >= 2")
    th = _theta(theta)
    value, ft = _umvue_over_t(x, n, th, model, cumulative)
    truth = _model.cdf(x, th, model) if cumulative else _model.pmf(x, th, model)
    first = math.fsum(value * ft)
    # unbiased, so sum (est - truth)^2 f(t) equals E[est^2] - truth^2 without the cancellation
    second = math.fsum((value - truth) ** 2 * ft)
    return first, second


def umvue_pmf_mse(x: int, n: int, theta: ThetaLike, model: ModelSpec) -> float:
    """Exact MSE (= variance) of the UMVUE of f(x)."""
    return max(0.0, umvue_moments(x, n, theta, model, cumulative=False)[1])


def umvue_cdf_mse(x: int, n: int, theta: ThetaLike, model: ModelSpec) -> float:
    """Exact MSE (= variance) of the UMVUE of F(x)."""
    return max(0.0, umvue_moments(x, n, theta, model, cumulative=True)[1])


def exact_mse_curves(config: MseStudyConfig) -> dict[str, MseCurve]:
    """UMVUE exact MSE curves keyed by target."""
    out = {}
    for target, fn in (("PMF", umvue_pmf_mse), ("CDF", umvue_cdf_mse)):
        pts = [MsePoint(n, fn(config.x, n, config.theta, config.model), 0.0) for n in config.sample_sizes]
        out[target] = MseCurve("UMVUE", target, pts)
    return out


# -------------------------------------------------------------- Monte Carlo


def _draw_sums(n: int, config: MseStudyConfig) -> tuple[np.ndarray, int]:
    """Sample sums, one per replication; returns (sums, number of all-zero samples seen)."""
    N = config.replications
    th = config.theta.value
    cum_w = cumulative_weights(th, config.model)
    sums = np.empty(N, dtype=np.int64)
    for i in range(N):
        sums[i] = _sample(n, th, cum_w, SeededStream(config.master_seed, i)).sum()
    zeros = np.flatnonzero(sums == 0)
    count = zeros.size
    if config.degenerate == "redraw":
        spare = N
        for i in zeros:
            while sums[i] == 0:
                sums[i] = _sample(n, th, cum_w, SeededStream(config.master_seed, spare)).sum()
                spare += 1
                count += int(sums[i] == 0)
    return sums, count


def plugin_estimates(x: int, thetas, model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """f(x; theta) and F(x; theta) for an array of theta estimates.

    theta = 1 stands for the boundary MLE of an all-zero sample, a point mass at 0.
    """
    thetas = np.asarray(thetas, dtype=float)
    inner = (thetas > 0) & (thetas < 1)
    th = np.where(inner, thetas, 0.5)
    w = np.arange(x + 1)
    log_h = -log_sum_exp_array(_log_component_terms(th, model))
    log_f = log_h[:, None] + _model.weight_poly(w, model)[None, :] + w[None, :] * np.log1p(-th)[:, None]
    f = np.exp(log_f)
    pmf_x = np.where(inner, f[:, x], float(x == 0))
    cdf_x = np.where(inner, np.minimum(f.sum(axis=1), 1.0), 1.0)
    return pmf_x, cdf_x


def _point(n: int, est: np.ndarray, truth: float, degenerate: int) -> MsePoint:
    N = est.size
    sq = (est - truth) ** 2
    if N > 1:
        se = float(np.std(sq, ddof=1) / math.sqrt(N))
        mean_se = float(np.std(est, ddof=1) / math.sqrt(N))
    else:
        se = mean_se = 0.0
    return MsePoint(n, float(np.mean(sq)), se, float(np.mean(est)), mean_se, degenerate)


def mc_mse_study(config: MseStudyConfig) -> list[MseCurve]:
    """Simulated MSE of the plug-in MLE and the UMVUE of f(x) and F(x).

    Replication i at every sample size draws from substream i of the master
    seed; both estimators are evaluated on the same samples.  All-zero samples
    are handled per ``config.degenerate`` and counted in each point.
    """
    if config.replications == 1:
        warnings.warn("a single replication gives no standard error; reporting 0", stacklevel=2)
    th, model, x = config.theta.value, config.model, config.x
    f_true = _model.pmf(x, th, model)
    F_true = _model.cdf(x, th, model)
    curves = {(e, g): MseCurve(e, g) for e in ESTIMATORS for g in TARGETS}
    for n in config.sample_sizes:
        sums, degenerate = _draw_sums(n, config)
        theta_hat = np.ones(sums.size)
        pos = sums > 0
        theta_hat[pos] = mle_theta_batch(sums[pos] / n, model)
        mle_pmf, mle_cdf = plugin_estimates(x, theta_hat, model)
        uniq, inv = np.unique(sums, return_inverse=True)
        log_an = _log_a(n, uniq, model)
        w = np.arange(x + 1)
        s = uniq[:, None] - w[None, :]
        log_an1 = _log_a(n - 1, s, model)
        fhat_w = np.exp(_model.weight_poly(w, model)[None, :] + log_an1 - log_an[:, None])
        u_pmf = fhat_w[:, x][inv]
        u_cdf = np.where(uniq <= x, 1.0, np.minimum(fhat_w.sum(axis=1), 1.0))[inv]
        for (e, g), est, truth in (
            (("MLE", "PMF"), mle_pmf, f_true),
            (("MLE", "CDF"), mle_cdf, F_true),
            (("UMVUE", "PMF"), u_pmf, f_true),
            (("UMVUE", "CDF"), u_cdf, F_true),
        ):
            curves[(e, g)].points.append(_point(n, est, truth, degenerate))
    return list(curves.values())
