import math

import numpy as np
import pytest

from conftest import make_params
from skewsphere import (
    FitOptions,
    MultivariateObservations,
    cl_objective,
    default_init,
    enumerate_pairs,
    from_unconstrained,
    godambe,
    lonlat_grid,
    maximize_cl,
    simulate_field,
    to_unconstrained,
)
from skewsphere.errors import NoValidStartError, ParameterDomainError
from skewsphere.fit import ParamPacking
from skewsphere.sphere import random_cap_sites


def test_transform_round_trip(exp_right_params):
    v = to_unconstrained(exp_right_params)
    assert v.shape == (9,)
    back = from_unconstrained(v, "exponential")
    assert np.allclose(back.sigma2, exp_right_params.sigma2, atol=1e-12)
    assert np.allclose(back.eta, exp_right_params.eta, atol=1e-12)
    assert np.allclose(back.corr.scales, exp_right_params.corr.scales, atol=1e-12)
    assert back.corr.rho12 == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(back.mu, exp_right_params.mu, atol=1e-12)


def test_transform_reference_slots():
    p = make_params(sigma2=(1.0, 1.0), rho=0.0)
    v = to_unconstrained(p)
    assert v[0] == 0.0  # log sigma2 of 1
    assert v[6] == 0.0  # atanh of rho 0


def test_transform_variants():
    p = make_params(scales=(0.2, 0.2))
    v8 = to_unconstrained(p, share_scale=True)
    assert v8.shape == (8,)
    back = from_unconstrained(v8, "exponential", share_scale=True)
    assert back.corr.scales[0] == back.corr.scales[1] == pytest.approx(0.2, rel=1e-12)

    g = make_params(eta=(0.0, 0.0))
    v7 = to_unconstrained(g, gaussian=True)
    assert v7.shape == (7,)
    back_g = from_unconstrained(v7, "exponential", gaussian=True)
    assert np.all(back_g.eta == 0.0)


def test_transform_domain_error():
    p = make_params(rho=1.0 - 1e-18)  # rounds to 1.0: not transformable
    with pytest.raises(ParameterDomainError):
        to_unconstrained(make_params(rho=1.5))


def test_ascent_never_below_truth_start(exp_right_params):
    p = exp_right_params
    sites = lonlat_grid(5, 5, -60.0, 60.0)
    obs = simulate_field(p, sites, 1, seed=2)
    ps = enumerate_pairs(sites, 2, 0.5)
    truth_value = cl_objective(obs, p, ps)
    res = maximize_cl(obs, sites, FitOptions(init=p, tol=1e-4, max_iters=800), 0.5)
    assert res.cl_value >= truth_value
    assert res.n_pairs == ps.n_pairs


def test_fit_deterministic(exp_right_params):
    p = exp_right_params
    sites = lonlat_grid(5, 4, -60.0, 60.0)
    obs = simulate_field(p, sites, 1, seed=7)
    opts = FitOptions(init=p, tol=1e-4, max_iters=600, n_starts=2, seed=5)
    a = maximize_cl(obs, sites, opts, 0.5)
    b = maximize_cl(obs, sites, opts, 0.5)
    assert a.cl_value == b.cl_value
    assert np.array_equal(a.estimate.sigma2, b.estimate.sigma2)
    assert np.array_equal(a.estimate.corr.scales, b.estimate.corr.scales)


def test_converged_fit_has_small_score(exp_right_params):
    p = exp_right_params
    sites = random_cap_sites(36, 0.5, seed=4)
    obs = simulate_field(p, sites, 2, seed=10)
    res = maximize_cl(obs, sites, FitOptions(init=p, tol=1e-6), 0.3)
    assert res.converged
    assert res.score_norm <= 1e-2 * max(1.0, abs(res.cl_value))


def test_default_init_recovers_moments():
    p = make_params(sigma2=(1.0, 0.5), eta=(1.5, -2.0), mu=(0.3, -0.7),
                    scales=(0.3, 0.3), rho=0.4)
    sites = random_cap_sites(64, 0.8, seed=6)
    obs = simulate_field(p, sites, 8, seed=12)
    init = default_init(obs, sites, "exponential")
    assert np.sign(init.eta[0]) == 1.0
    assert np.sign(init.eta[1]) == -1.0
    assert abs(init.mu[0] - 0.3) < 0.5
    assert abs(init.mu[1] + 0.7) < 0.5
    assert 0.0 < init.corr.rho12 < 0.9
    assert np.all(init.corr.scales > 0.0)
    # init must be a usable optimizer start
    ps = enumerate_pairs(sites, 2, 0.4)
    assert np.isfinite(cl_objective(obs, init, ps))


def test_no_valid_start_on_nan_data(exp_right_params):
    sites = lonlat_grid(3, 2, -30.0, 30.0)
    values = np.full((1, 2, sites.n), np.nan)
    obs = MultivariateObservations(values)
    with pytest.raises(NoValidStartError):
        maximize_cl(obs, sites, FitOptions(init=exp_right_params, max_iters=50), 0.5)


def test_no_pairs_in_cutoff_error(exp_right_params):
    sites = lonlat_grid(3, 1, 0.0, 1.0)
    obs = simulate_field(exp_right_params, sites, 1, seed=1)
    # a fit needs at least one stored pair; zero cutoff still keeps the
    # collocated cross pairs, so use a single-component data set instead
    import skewsphere

    p1 = skewsphere.ParameterVector(
        [1.0], [0.5], [0.0], skewsphere.CorrelationSpec("exponential", [0.2], 0.0)
    )
    obs1 = MultivariateObservations(obs.values[:, :1, :])
    with pytest.raises(NoValidStartError):
        maximize_cl(obs1, sites, FitOptions(init=p1), 1e-9)


def test_gaussian_fit_freezes_eta(exp_right_params):
    sites = random_cap_sites(25, 0.5, seed=14)
    obs = simulate_field(exp_right_params, sites, 1, seed=15)
    res = maximize_cl(
        obs, sites, FitOptions(init=make_params(eta=(0.0, 0.0)),
                               tol=1e-4, max_iters=1500, gaussian=True), 0.4,
    )
    assert np.all(res.estimate.eta == 0.0)


def test_share_scale_fit_ties_scales(exp_right_params):
    sites = random_cap_sites(25, 0.5, seed=16)
    p = make_params(scales=(0.2, 0.2))
    obs = simulate_field(p, sites, 1, seed=17)
    res = maximize_cl(
        obs, sites, FitOptions(init=p, tol=1e-4, max_iters=1500, share_scale=True), 0.4,
    )
    assert res.estimate.corr.scales[0] == res.estimate.corr.scales[1]


def test_godambe_gaussian_submodel_sane():
    p = make_params(eta=(0.0, 0.0), scales=(0.25, 0.25), rho=0.5)
    sites = random_cap_sites(36, 0.6, seed=18)
    obs = simulate_field(p, sites, 2, seed=19)
    res = maximize_cl(obs, sites, FitOptions(init=p, tol=1e-5, gaussian=True), 0.3)
    report = godambe(obs, sites, res.estimate, 0.3, n_boot=40, seed=20, gaussian=True)
    assert not report.j_singular
    assert report.std_errors is not None
    assert np.all(np.isfinite(report.std_errors))
    assert np.all(report.std_errors > 0.0)
    assert np.array_equal(report.h, report.h.T)  # symmetric by construction
    assert report.param_names[0] == "sigma2_1"


def test_godambe_packing_names():
    packing = ParamPacking("exponential", share_scale=True, gaussian=False)
    assert packing.names == [
        "sigma2_1", "sigma2_2", "eta_1", "eta_2", "c", "rho_12", "mu_1", "mu_2",
    ]


def test_coverage_of_cross_correlation_interval(exp_right_params):
    """Sandwich intervals are honest: over 50 simulate/fit/uncertainty
    rounds the two-standard-error interval for the cross coefficient covers
    the truth at least 80% of the time (rounds whose information matrix is
    flagged singular count as misses)."""
    p = exp_right_params
    sites = random_cap_sites(49, 0.6, seed=8)
    n_rounds = 50
    covered = 0
    for rnd in range(n_rounds):
        obs = simulate_field(p, sites, 4, seed=6000 + rnd)
        res = maximize_cl(obs, sites, FitOptions(init=p, tol=1e-4, seed=rnd), 0.25)
        report = godambe(obs, sites, res.estimate, 0.25, n_boot=50,
                         seed=9000 + rnd)
        if report.std_errors is None:
            continue
        rho_hat = res.estimate.corr.rho12
        se = report.std_errors[report.param_names.index("rho_12")]
        if rho_hat - 2.0 * se <= 0.5 <= rho_hat + 2.0 * se:
            covered += 1
    assert covered >= 0.8 * n_rounds, f"covered {covered}/{n_rounds}"
