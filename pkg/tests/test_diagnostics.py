import math

import numpy as np
import pytest

from conftest import make_params
from skewsphere import (
    MultivariateObservations,
    cov,
    density_overlay,
    empirical_semivariogram,
    lonlat_grid,
    simulate_field,
    skew_marginal_logpdf,
    theoretical_semivariogram,
)
from skewsphere.errors import ParameterDomainError
from skewsphere.sphere import Site, SiteSet


def test_constant_field_has_zero_semivariogram():
    sites = lonlat_grid(4, 3, -50.0, 50.0)
    obs = MultivariateObservations(np.full((1, 2, sites.n), 3.7))
    for i, j in ((0, 0), (1, 1), (0, 1)):
        table = empirical_semivariogram(obs, sites, i, j, 6, math.pi)
        filled = table.count > 0
        assert np.all(table.gamma[filled] == 0.0)


def test_cross_semivariogram_symmetric_in_components(exp_mixed_params):
    sites = lonlat_grid(4, 3, -50.0, 50.0)
    obs = simulate_field(exp_mixed_params, sites, 2, seed=11)
    a = empirical_semivariogram(obs, sites, 0, 1, 8, 2.0)
    b = empirical_semivariogram(obs, sites, 1, 0, 8, 2.0)
    assert np.array_equal(a.gamma, b.gamma, equal_nan=True)
    assert np.array_equal(a.count, b.count)


def test_bin_counts_sum_to_qualifying_pairs():
    sites = lonlat_grid(5, 4, -60.0, 60.0)
    obs = MultivariateObservations(np.zeros((1, 2, sites.n)))
    max_dist = 1.3
    table = empirical_semivariogram(obs, sites, 0, 0, 7, max_dist)
    theta = sites.angles()
    k, l = np.triu_indices(sites.n, k=1)
    expected = int(np.sum(theta[k, l] <= max_dist))
    assert int(table.count.sum()) == expected


def test_shift_invariance_exact(exp_right_params):
    sites = lonlat_grid(4, 3, -50.0, 50.0)
    obs = simulate_field(exp_right_params, sites, 1, seed=13)
    shifted = MultivariateObservations(obs.values + 11.25)
    for i, j in ((0, 0), (0, 1)):
        a = empirical_semivariogram(obs, sites, i, j, 6, 2.5)
        b = empirical_semivariogram(shifted, sites, i, j, 6, 2.5)
        assert np.allclose(a.gamma, b.gamma, equal_nan=True, atol=1e-10)


def test_empty_bins_flagged():
    sites = SiteSet([Site(0.0, 0.0), Site(1.0, 0.0)])  # one tiny distance
    obs = MultivariateObservations(np.zeros((1, 2, 2)))
    table = empirical_semivariogram(obs, sites, 0, 0, 10, math.pi)
    assert table.count[0] == 1
    assert np.all(table.count[1:] == 0)
    assert np.all(np.isnan(table.gamma[1:]))


def test_semivariogram_matches_model_on_average(exp_right_params):
    """Replicate-averaged empirical semivariogram at a fixed distance agrees
    with the model value within Monte Carlo error."""
    p = exp_right_params
    theta0 = 0.2
    sites = SiteSet([Site(0.0, 0.0), Site(math.degrees(theta0), 0.0)])
    n_reps = 10_000
    obs = simulate_field(p, sites, n_reps, seed=17)
    for i, j in ((0, 0), (1, 1), (0, 1)):
        di = obs.values[:, i, 0] - obs.values[:, i, 1]
        dj = obs.values[:, j, 0] - obs.values[:, j, 1]
        draws = 0.5 * di * dj
        est = draws.mean()
        se = draws.std(ddof=1) / math.sqrt(n_reps)
        expected = cov(p, i, j, 0.0) - cov(p, i, j, theta0)
        assert abs(est - expected) < 4.0 * se
        # the binned estimator pools the same quantity
        table = empirical_semivariogram(obs, sites, i, j, 1, 0.5)
        assert table.gamma[0] == pytest.approx(est, rel=1e-12)


def test_theoretical_semivariogram_properties(exp_right_params, askey_right_params):
    assert theoretical_semivariogram(exp_right_params, 0, 0, 0.0) == 0.0
    p = askey_right_params  # scales (0.3, 0.5) -> cross cutoff 0.4
    grid = np.array([0.45, 1.0, 2.0])
    gamma = theoretical_semivariogram(p, 0, 1, grid)
    assert np.allclose(gamma, cov(p, 0, 1, 0.0))
    grid2 = np.linspace(0.0, 1.0, 7)
    expected = cov(p, 0, 1, 0.0) - cov(p, 0, 1, grid2)
    assert np.allclose(theoretical_semivariogram(p, 0, 1, grid2), expected)


def test_semivariogram_validation(exp_right_params):
    sites = lonlat_grid(3, 2, -30.0, 30.0)
    obs = simulate_field(exp_right_params, sites, 1, seed=1)
    with pytest.raises(ParameterDomainError):
        empirical_semivariogram(obs, sites, 0, 0, 0, 1.0)
    with pytest.raises(ParameterDomainError):
        empirical_semivariogram(obs, sites, 0, 0, 5, 4.0)


def test_density_overlay_symmetric_when_unskewed():
    p = make_params(eta=(0.0, 0.0), mu=(0.0, 0.0))
    grid = np.linspace(-4.0, 4.0, 81)
    dens = density_overlay(p, 0, grid)
    assert np.allclose(dens, dens[::-1], atol=1e-15)


def test_density_overlay_integrates_to_one(exp_mixed_params):
    p = exp_mixed_params
    for i in (0, 1):
        omega = math.sqrt(p.eta[i] ** 2 + p.sigma2[i])
        grid = np.linspace(p.mu[i] - 12 * omega, p.mu[i] + 12 * omega, 4001)
        dens = density_overlay(p, i, grid)
        assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=1e-6)


def test_density_overlay_sign_flip():
    left = make_params(eta=(-1.5, 1.0))
    right = make_params(eta=(1.5, 1.0))
    grid = np.linspace(-5.0, 5.0, 101)
    assert np.allclose(
        density_overlay(left, 0, grid),
        density_overlay(right, 0, -grid),
        atol=1e-15,
    )
