import math

import numpy as np
import pytest

from ndoppe.estimate import umvue_cdf_table, umvue_pmf
from ndoppe.model import ModelSpec, Theta, cdf, pmf
from ndoppe.risk import (
    MseStudyConfig,
    exact_mse_curves,
    mc_mse_study,
    plugin_estimates,
    umvue_cdf_mse,
    umvue_moments,
    umvue_pmf_mse,
)
from ndoppe.sampler import SeededStream, sample

NDL = ModelSpec.ndl()
R3 = ModelSpec((1.0, 0.5, 2.0))


def by_key(curves):
    return {(c.estimator, c.target): c for c in curves}


def test_config_validation():
    with pytest.raises(ValueError):
        MseStudyConfig(NDL, Theta(0.3), 2, (10, 10), 5)
    with pytest.raises(ValueError):
        MseStudyConfig(NDL, Theta(0.3), 2, (20, 10), 5)
    with pytest.raises(ValueError):
        MseStudyConfig(NDL, Theta(0.3), 2, (10,), 0)
    with pytest.raises(ValueError):
        MseStudyConfig(NDL, Theta(0.3), -1, (10,), 5)
    assert MseStudyConfig(NDL, 0.3, 2, (10,), 5).theta == Theta(0.3)


@pytest.mark.parametrize("m", [NDL, R3])
@pytest.mark.parametrize("th", [0.1, 0.5, 0.9])
def test_exact_mse_nonnegative(m, th):
    for x in (0, 2, 7):
        for n in (2, 6):
            assert umvue_pmf_mse(x, n, th, m) >= 0
            assert umvue_cdf_mse(x, n, th, m) >= 0


def test_exact_moments_unbiased_r3():
    for x in (0, 4):
        e, _ = umvue_moments(x, 5, 0.35, R3)
        assert e == pytest.approx(pmf(x, 0.35, R3), abs=1e-10)
        e, _ = umvue_moments(x, 5, 0.35, R3, cumulative=True)
        assert e == pytest.approx(cdf(x, 0.35, R3), abs=1e-10)


def test_exact_mse_against_one_million_replications():
    n, th, x, N = 5, 0.3, 2, 1_000_000
    t = sample(n * N, th, NDL, SeededStream(99, 0)).reshape(N, n).sum(axis=1)
    uniq, inv = np.unique(t, return_inverse=True)
    fhat = umvue_pmf(x, n, uniq, NDL)[inv]
    Fhat = umvue_cdf_table(x, n, uniq, NDL)[:, x][inv]
    for est, truth, exact in (
        (fhat, pmf(x, th, NDL), umvue_pmf_mse(x, n, th, NDL)),
        (Fhat, cdf(x, th, NDL), umvue_cdf_mse(x, n, th, NDL)),
    ):
        sq = (est - truth) ** 2
        se = sq.std(ddof=1) / math.sqrt(N)
        assert abs(sq.mean() - exact) <= 3 * se


def test_exact_mse_decreases_with_n_small_theta():
    assert umvue_pmf_mse(2, 40, 0.01, NDL) > umvue_pmf_mse(2, 80, 0.01, NDL)
    assert umvue_cdf_mse(2, 40, 0.01, NDL) > umvue_cdf_mse(2, 80, 0.01, NDL)


def test_cdf_mse_vanishes_for_large_x():
    vals = [umvue_cdf_mse(x, 4, 0.5, NDL) for x in (1, 5, 20, 60)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-12


def test_exact_curves_shape():
    cfg = MseStudyConfig(NDL, Theta(0.3), 2, (3, 6, 12), 10)
    curves = exact_mse_curves(cfg)
    assert set(curves) == {"PMF", "CDF"}
    for c in curves.values():
        assert c.estimator == "UMVUE"
        assert c.sizes == [3, 6, 12]
        assert (np.diff(c.mse) < 0).all()


def test_study_is_deterministic():
    cfg = MseStudyConfig(R3, Theta(0.4), 1, (4, 8), 200, master_seed=123)
    a, b = mc_mse_study(cfg), mc_mse_study(cfg)
    assert [c.points for c in a] == [c.points for c in b]
    assert len(a) == 4
    assert {(c.estimator, c.target) for c in a} == {
        ("MLE", "PMF"),
        ("MLE", "CDF"),
        ("UMVUE", "PMF"),
        ("UMVUE", "CDF"),
    }


def test_study_seed_changes_result():
    a = mc_mse_study(MseStudyConfig(NDL, Theta(0.4), 1, (4,), 200, master_seed=1))
    b = mc_mse_study(MseStudyConfig(NDL, Theta(0.4), 1, (4,), 200, master_seed=2))
    assert a[0].points[0].mse != b[0].points[0].mse


def test_single_replication_warns():
    with pytest.warns(UserWarning):
        curves = mc_mse_study(MseStudyConfig(NDL, Theta(0.4), 1, (4,), 1))
    assert all(c.points[0].std_error == 0.0 for c in curves)


def test_degenerate_samples_are_redrawn():
    # theta = 0.9, n = 2: P(all zero) = (0.81 * 2 / 1.9)^2, about 0.73
    cfg = MseStudyConfig(NDL, Theta(0.9), 0, (2,), 100, master_seed=5, degenerate="redraw")
    curves = by_key(mc_mse_study(cfg))
    assert curves[("MLE", "PMF")].points[0].degenerate > 50
    assert all(np.isfinite(c.points[0].mse) for c in curves.values())
    # conditioning on T > 0 removes every fhat(0 | t = 0) = 1 term
    assert curves[("UMVUE", "PMF")].points[0].mean_estimate < pmf(0, 0.9, NDL) - 0.3


def test_degenerate_samples_kept_at_boundary():
    cfg = MseStudyConfig(NDL, Theta(0.9), 0, (2, 3), 4000, master_seed=5)
    curves = by_key(mc_mse_study(cfg))
    assert curves[("MLE", "PMF")].points[0].degenerate > 2000
    for target, truth in (("PMF", pmf(0, 0.9, NDL)), ("CDF", cdf(0, 0.9, NDL))):
        for p in curves[("UMVUE", target)].points:
            assert abs(p.mean_estimate - truth) <= 3 * p.mean_std_error


def test_plugin_estimates():
    thetas = np.array([0.05, 0.4, 0.95, 1.0])
    f, F = plugin_estimates(3, thetas, R3)
    for th, fv, Fv in zip(thetas[:3], f, F):
        assert fv == pytest.approx(pmf(3, th, R3), rel=1e-12)
        assert Fv == pytest.approx(cdf(3, th, R3), abs=1e-12)
    assert (f[3], F[3]) == (0.0, 1.0)
    f0, F0 = plugin_estimates(0, np.array([1.0]), R3)
    assert (f0[0], F0[0]) == (1.0, 1.0)


def test_bad_degenerate_policy():
    with pytest.raises(ValueError):
        MseStudyConfig(NDL, Theta(0.3), 2, (5,), 10, degenerate="skip")


@pytest.mark.parametrize("th", [0.1, 0.3, 0.5])
def test_exact_vs_simulated_grid(th):
    for x in (0, 2, 5):
        cfg = MseStudyConfig(NDL, Theta(th), x, (2, 5, 10, 20), 10_000, master_seed=7)
        curves = by_key(mc_mse_study(cfg))
        exact = exact_mse_curves(cfg)
        for target, truth in (("PMF", pmf(x, th, NDL)), ("CDF", cdf(x, th, NDL))):
            for sim, ex in zip(curves[("UMVUE", target)].points, exact[target].points):
                assert abs(sim.mse - ex.mse) <= 4 * sim.std_error, (target, x, sim.n)
                # study-level unbiasedness
                assert abs(sim.mean_estimate - truth) <= 3 * sim.mean_std_error + 1e-15


def test_umvue_beats_mle_for_pmf_at_small_theta():
    cfg = MseStudyConfig(NDL, Theta(0.01), 2, (25, 100), 1000, master_seed=0)
    curves = by_key(mc_mse_study(cfg))
    for a, b in zip(curves[("UMVUE", "PMF")].points, curves[("MLE", "PMF")].points):
        assert a.mse < b.mse
