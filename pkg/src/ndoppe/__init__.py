"""Natural discrete one-parameter polynomial exponential (NDOPPE) distributions.

A finite mixture of negative binomials with MLE and UMVUE estimation of the
PMF and CDF, exact UMVUE risk, and Monte Carlo risk studies.
"""

from .estimate import (
    LogPolyPower,
    Sample,
    a_n_t,
    conditional_pmf,
    log_likelihood,
    log_poly_power,
    mle_theta,
    sum_statistic_pmf,
    umvue_cdf,
    umvue_pmf,
)
from .model import ModelSpec, Theta, cdf, mean, mixture_weights, normalizer, pmf, weight_poly
from .risk import MseCurve, MseStudyConfig, mc_mse_study, umvue_cdf_mse, umvue_pmf_mse
from .sampler import SeededStream, sample, sample_component, sample_nb

__version__ = "0.1.0"
