"""Exact bivariate log likelihood of a skew-Gaussian pair and the marginal
skew-Gaussian density.

The pair density of (Z_i(s_k), Z_j(s_l)) is a two-term mixture: for each
sign of the latent |X| correlation it multiplies a bivariate normal density
(covariance: latent Y part plus the eta-scaled |X| part) by a bivariate
normal cdf whose argument and covariance come from closed 2x2 forms.  Both
terms are positive; the implementation combines their logs with log-sum-exp
and floors the cdf at 1e-320 before taking logs, so the result is finite
for every finite observation.

Skewness coefficients with magnitude below 1e-8 are handled by the Gaussian
branch (both tiny) or clamped to +-1e-8 (one tiny); at that scale the two
evaluations agree to well below 1e-6 in log density.
"""

import numpy as np
from scipy.special import log_ndtr

from . import kernels
from .corrmodels import latent_corr
from .errors import (
    DegeneratePairError,
    InvalidParameterError,
    ParameterDomainError,
)
from .model import ParameterVector

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def skew_marginal_logpdf(z, mu, eta, sigma2):
    """Log density of a single skew-Gaussian observation.

    With omega = sqrt(eta^2 + sigma2) the density is
    (2/omega) phi(a/omega) Phi((eta/sigma) a/omega) for a = z - mu; when
    |eta| <= 1e-8 the plain Gaussian log density with variance sigma2 is
    returned.
    """
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.any(sigma2 <= 0.0):
        raise ParameterDomainError("sigma2 must be > 0")
    z, mu, eta, sigma2 = np.broadcast_arrays(
        np.asarray(z, dtype=float), np.asarray(mu, dtype=float),
        np.asarray(eta, dtype=float), sigma2,
    )
    a = z - mu
    eta = np.where(np.abs(eta) <= kernels.ETA_FLOOR, 0.0, eta)
    omega2 = eta * eta + sigma2
    log_gauss = -_LOG_SQRT_2PI - 0.5 * np.log(omega2) - 0.5 * a * a / omega2
    # log Phi(0) cancels the log 2, so eta = 0 is exactly the Gaussian case
    alpha = eta / np.sqrt(sigma2)
    out = log_gauss + np.log(2.0) + log_ndtr(alpha * a / np.sqrt(omega2))
    return float(out) if out.ndim == 0 else out


def pair_loglik(p: ParameterVector, i: int, j: int, theta: float, z) -> float:
    """Log likelihood of the pair (Z_i(s_k), Z_j(s_l)) at geodesic angle
    ``theta``.

    Raises a degenerate-pair error when the latent |X| correlation block is
    singular (|r| = 1, e.g. a marginal pair at zero distance) and an
    invalid-parameter error when the latent Y block is not positive
    definite; the composite-likelihood objective converts the latter into a
    -inf sentinel instead of raising.
    """
    r = float(latent_corr(p.corr, i, j, float(theta)))
    if abs(r) > 1.0:
        raise InvalidParameterError(
            f"latent correlation {r} for pair ({i}, {j}) exceeds 1 in magnitude"
        )
    if abs(r) >= 1.0 - 1e-15:
        raise DegeneratePairError(
            f"latent correlation block for pair ({i}, {j}) at theta={theta} "
            "is singular"
        )
    a1 = float(z[0]) - p.mu[i]
    a2 = float(z[1]) - p.mu[j]
    val = kernels.pair_loglik(
        a1, a2, float(p.sigma2[i]), float(p.sigma2[j]),
        float(p.eta[i]), float(p.eta[j]), r, r,
    )
    if np.isnan(val):
        raise InvalidParameterError(
            f"pair ({i}, {j}) at theta={theta} has a non-PD latent block"
        )
    return float(val)
