"""Multivariate skew-Gaussian random fields on the unit sphere.

Simulation, weighted pairwise composite-likelihood estimation, cokriging
prediction and variogram diagnostics for multivariate random fields whose
components have skew-Gaussian marginals, built from two independent latent
Gaussian fields with geodesic-isotropic correlation.
"""

from .corrmodels import CorrelationSpec, askey_corr, exponential_corr, latent_corr
from .kernels import BACKEND_NAME
from .model import (
    MultivariateObservations,
    ParameterVector,
    collocated_corr,
    cov,
    halfnorm_cov_shape,
    joint_moments,
    marginal_mean,
)
from .sphere import Site, SiteSet, geodesic, lonlat_grid, random_sites
from .bvn import Cov2, norm_cdf, norm_pdf, phi2_cdf, phi2_logpdf, phi2_pdf
from .pairlik import pair_loglik, skew_marginal_logpdf
from .cl import PairSet, cl_objective, enumerate_pairs
from .simulate import simulate_field
from .fit import (
    FitOptions,
    FitResult,
    UncertaintyReport,
    default_init,
    from_unconstrained,
    godambe,
    maximize_cl,
    to_unconstrained,
)
from .predict import cokrige, drop_one_scores
from .diagnostics import (
    density_overlay,
    empirical_semivariogram,
    theoretical_semivariogram,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "CorrelationSpec",
    "Cov2",
    "FitOptions",
    "FitResult",
    "MultivariateObservations",
    "PairSet",
    "ParameterVector",
    "Site",
    "SiteSet",
    "UncertaintyReport",
    "askey_corr",
    "cl_objective",
    "cokrige",
    "collocated_corr",
    "cov",
    "default_init",
    "density_overlay",
    "drop_one_scores",
    "empirical_semivariogram",
    "enumerate_pairs",
    "exponential_corr",
    "from_unconstrained",
    "geodesic",
    "godambe",
    "halfnorm_cov_shape",
    "joint_moments",
    "latent_corr",
    "lonlat_grid",
    "marginal_mean",
    "maximize_cl",
    "norm_cdf",
    "norm_pdf",
    "pair_loglik",
    "phi2_cdf",
    "phi2_logpdf",
    "phi2_pdf",
    "random_sites",
    "simulate_field",
    "skew_marginal_logpdf",
    "theoretical_semivariogram",
    "to_unconstrained",
]
