"""Empirical and theoretical semivariograms plus fitted-density tables.

These produce plot-ready tables only; rendering is left to external tools.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError, ShapeError
from .model import MultivariateObservations, ParameterVector, cov
from .pairlik import skew_marginal_logpdf
from .sphere import SiteSet


@dataclass
class SemivariogramTable:
    bin_center: np.ndarray
    gamma: np.ndarray
    count: np.ndarray  # qualifying site pairs per bin (replicate independent)


def empirical_semivariogram(
    obs: MultivariateObservations,
    s: SiteSet,
    i: int,
    j: int,
    n_bins: int,
    max_dist: float,
) -> SemivariogramTable:
    """Classical moment estimator binned by geodesic distance.

    Marginal (i = j): gamma = mean of squared increments / 2.  Cross: the
    Matheron form, mean of products of the two components' increments / 2.
    Replicates are pooled.  Empty bins carry NaN and a zero count.
    """
    if n_bins < 1:
        raise ParameterDomainError("n_bins must be >= 1")
    if not 0.0 < max_dist <= np.pi:
        raise ParameterDomainError("max_dist must lie in (0, pi]")
    if obs.n != s.n:
        raise ShapeError("observations do not match the site set")
    theta = s.angles()
    k_idx, l_idx = np.triu_indices(s.n, k=1)
    d = theta[k_idx, l_idx]
    keep = d <= max_dist
    k_idx, l_idx, d = k_idx[keep], l_idx[keep], d[keep]
    which = np.minimum((d / max_dist * n_bins).astype(int), n_bins - 1)

    counts = np.bincount(which, minlength=n_bins)
    sums = np.zeros(n_bins)
    for rep in range(obs.n_reps):
        di = obs.values[rep, i, k_idx] - obs.values[rep, i, l_idx]
        dj = obs.values[rep, j, k_idx] - obs.values[rep, j, l_idx]
        sums += np.bincount(which, weights=di * dj, minlength=n_bins)
    denom = 2.0 * counts * obs.n_reps
    gamma = np.where(counts > 0, sums / np.where(denom > 0, denom, 1.0), np.nan)
    width = max_dist / n_bins
    centers = (np.arange(n_bins) + 0.5) * width
    return SemivariogramTable(centers, gamma, counts)


def theoretical_semivariogram(p: ParameterVector, i: int, j: int, theta_grid):
    """gamma_ij(theta) = C_ij(0) - C_ij(theta) on the given grid."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    return cov(p, i, j, 0.0) - cov(p, i, j, theta_grid)


def density_overlay(p: ParameterVector, i: int, z_grid):
    """Fitted marginal density of component i evaluated on a grid."""
    z_grid = np.asarray(z_grid, dtype=float)
    return np.exp(
        skew_marginal_logpdf(z_grid, p.mu[i], p.eta[i], p.sigma2[i])
    )
