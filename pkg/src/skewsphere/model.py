"""The skew-Gaussian field model: parameters, moments and covariance
assembly.

Each component is built from two independent zero-mean unit-variance latent
Gaussian fields X and Y as

    Z_i(s) = mu_i + eta_i * |X_i(s)| + sigma_i * Y_i(s),

which gives the marginal mean mu_i + eta_i * sqrt(2/pi) and the covariance

    C_ij(theta) = (2 eta_i eta_j / pi) * g(r_ij(theta)) + sigma_i sigma_j * r_ij(theta)

where g is the half-normal covariance shape implemented below and r_ij is
the shared latent correlation.
"""

from dataclasses import dataclass

import numpy as np

from .corrmodels import CorrelationSpec, latent_corr
from .errors import NotPositiveDefiniteError, ParameterDomainError, ShapeError
from .sphere import SiteSet

SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


@dataclass
class ParameterVector:
    """Model parameters for m components.

    sigma2 : per-component latent Gaussian variances (> 0)
    eta    : per-component skewness coefficients (any sign)
    mu     : per-component locations
    corr   : latent correlation structure (family, scales, cross rho)

    The bivariate model has the nine free parameters
    (sigma2_1, sigma2_2, eta_1, eta_2, c_11, c_22, rho_12, mu_1, mu_2).
    """

    sigma2: np.ndarray
    eta: np.ndarray
    mu: np.ndarray
    corr: CorrelationSpec

    def __post_init__(self):
        self.sigma2 = np.atleast_1d(np.asarray(self.sigma2, dtype=float))
        self.eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        if np.any(self.sigma2 <= 0.0):
            raise ParameterDomainError("sigma2 entries must be > 0")
        m = len(self.sigma2)
        if len(self.eta) != m or len(self.mu) != m or self.corr.m != m:
            raise ShapeError("sigma2, eta, mu and corr must agree on m")

    @property
    def m(self):
        return len(self.sigma2)

    @property
    def sigma(self):
        return np.sqrt(self.sigma2)


@dataclass
class MultivariateObservations:
    """Per-site, per-component values with independent replicates.

    ``values`` has shape (n_reps, m, n): replicate, component, site.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 2:
            self.values = self.values[None, :, :]
        if self.values.ndim != 3:
            raise ShapeError("observations must have shape (n_reps, m, n)")

    @property
    def n_reps(self):
        return self.values.shape[0]

    @property
    def m(self):
        return self.values.shape[1]

    @property
    def n(self):
        return self.values.shape[2]


def halfnorm_cov_shape(t):
    """sqrt(1 - t^2) + t*arcsin(t) - 1 on [-1, 1].

    Scaled by 2/pi this is the covariance of the absolute values of a
    standard Gaussian pair with correlation t.  Even, nonnegative, and well
    conditioned up to |t| = 1 even though its derivative is singular there.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ParameterDomainError("halfnorm_cov_shape domain is [-1, 1]")
    return np.sqrt(1.0 - t * t) + t * np.arcsin(t) - 1.0


def marginal_mean(p: ParameterVector, i: int) -> float:
    """E Z_i = mu_i + eta_i * sqrt(2/pi)."""
    return float(p.mu[i] + p.eta[i] * SQRT_2_OVER_PI)


def cov(p: ParameterVector, i: int, j: int, theta) -> float:
    """Covariance between components i and j at geodesic angle theta.

    Latent correlations are clamped to [-1, 1] only within rounding noise;
    a genuinely out-of-range cross coefficient propagates a domain error.
    """
    r = latent_corr(p.corr, i, j, theta)
    if np.any(np.abs(r) > 1.0 + 1e-12):
        raise ParameterDomainError(
            f"latent correlation for pair ({i}, {j}) exceeds 1 in magnitude; "
            f"cross rho {p.corr.rho_matrix[i, j]} is not a correlation"
        )
    r = np.clip(r, -1.0, 1.0)
    shape = halfnorm_cov_shape(r)
    out = (2.0 * p.eta[i] * p.eta[j] / np.pi) * shape + p.sigma[i] * p.sigma[j] * r
    return float(out) if np.ndim(theta) == 0 else out


def collocated_corr(p: ParameterVector, i: int, j: int, rho_x=None, rho_y=None):
    """Correlation of components i and j at zero distance.

    ``rho_x``/``rho_y`` optionally override the latent cross coefficients
    independently (a diagnostic-only path; the fitted model ties them).
    """
    if i == j:
        return 1.0
    tied = p.corr.rho_matrix[i, j]
    rx = tied if rho_x is None else float(rho_x)
    ry = tied if rho_y is None else float(rho_y)
    c12 = (2.0 * p.eta[i] * p.eta[j] / np.pi) * halfnorm_cov_shape(rx) + (
        p.sigma[i] * p.sigma[j] * ry
    )
    cii = cov(p, i, i, 0.0)
    cjj = cov(p, j, j, 0.0)
    return float(c12 / np.sqrt(cii * cjj))


def joint_moments(p: ParameterVector, s: SiteSet):
    """Mean vector and covariance matrix of the field over a site set.

    Ordering is component-major: entry i*n + k corresponds to component i at
    site k.  The assembled matrix must admit a Cholesky factorization;
    otherwise a not-positive-definite error naming the parameters is raised.
    """
    n = s.n
    m = p.m
    theta = s.angles()
    mean = np.empty(m * n)
    cov_mat = np.empty((m * n, m * n))
    for i in range(m):
        mean[i * n : (i + 1) * n] = marginal_mean(p, i)
        for j in range(i, m):
            block = cov(p, i, j, theta)
            cov_mat[i * n : (i + 1) * n, j * n : (j + 1) * n] = block
            if i != j:
                cov_mat[j * n : (j + 1) * n, i * n : (i + 1) * n] = block.T
    try:
        np.linalg.cholesky(cov_mat)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "joint covariance is not positive definite for parameters "
            f"sigma2={p.sigma2.tolist()}, eta={p.eta.tolist()}, "
            f"scales={p.corr.scales.tolist()}, rho={p.corr.rho_matrix.tolist()}"
        ) from None
    return mean, cov_mat
