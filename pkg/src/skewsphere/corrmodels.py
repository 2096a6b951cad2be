"""Univariate correlation families on [0, pi] and the multivariate
cross-correlation structure of the latent fields.

Two families are provided: an exponential decay scaled so the correlation
falls below 0.05 beyond its scale, and the compactly supported Askey
function.  Cross terms use a common scale c_ij = (c_ii + c_jj) / 2 and a
single cross-correlation coefficient shared by both latent fields.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError


def exponential_corr(theta, c):
    """exp(-3*theta/c): value 1 at zero and < 0.05 for theta > c."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise ParameterDomainError("exponential scale c must be > 0")
    # denormal scales overflow the ratio; exp(-inf) = 0 is the right limit
    with np.errstate(over="ignore"):
        return np.exp(-3.0 * np.asarray(theta, dtype=float) / c)


def askey_corr(theta, c):
    """(1 - theta/c)_+^4: compactly supported, exactly 0 for theta >= c."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise ParameterDomainError("askey scale c must be > 0")
    base = np.maximum(0.0, 1.0 - np.asarray(theta, dtype=float) / c)
    return base**4


FAMILIES = {
    "exponential": exponential_corr,
    "askey": askey_corr,
}


def family_function(name: str):
    try:
        return FAMILIES[name]
    except KeyError:
        raise ParameterDomainError(
            f"unknown correlation family {name!r}; known: {sorted(FAMILIES)}"
        ) from None


@dataclass
class CorrelationSpec:
    """Latent correlation structure: family, per-component scales and the
    cross-correlation coefficients.

    ``cross_rho`` may be a scalar (two components) or a full symmetric
    matrix with unit diagonal.  Scales must be strictly positive; a
    cross-correlation outside [-1, 1] is representable but every use that
    needs positive definiteness will reject it (the composite-likelihood
    objective maps it to -inf rather than raising).
    """

    family: str
    scales: np.ndarray
    cross_rho: object = 0.0
    rho_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        family_function(self.family)
        self.scales = np.atleast_1d(np.asarray(self.scales, dtype=float))
        if np.any(self.scales <= 0.0):
            raise ParameterDomainError("correlation scales must be > 0")
        m = len(self.scales)
        rho = np.asarray(self.cross_rho, dtype=float)
        if rho.ndim == 0:
            mat = np.eye(m)
            mat[~np.eye(m, dtype=bool)] = float(rho)
        else:
            if rho.shape != (m, m):
                raise ParameterDomainError(
                    f"cross_rho matrix must be {m}x{m}, got {rho.shape}"
                )
            if not np.allclose(rho, rho.T, atol=1e-12):
                raise ParameterDomainError("cross_rho matrix must be symmetric")
            if not np.allclose(np.diag(rho), 1.0, atol=1e-12):
                raise ParameterDomainError("cross_rho diagonal must be 1")
            mat = rho.copy()
        self.rho_matrix = mat

    @property
    def m(self):
        return len(self.scales)

    @property
    def rho12(self):
        """Convenience accessor for the bivariate cross coefficient."""
        if self.m < 2:
            raise ParameterDomainError("rho12 needs at least two components")
        return float(self.rho_matrix[0, 1])

    def pair_scale(self, i, j):
        """Scale used for the (i, j) term: own scale on the diagonal, the
        arithmetic mean of the two own scales off it."""
        return 0.5 * (self.scales[i] + self.scales[j])

    def is_valid(self):
        """True when every cross coefficient lies in [-1, 1]."""
        off = self.rho_matrix[~np.eye(self.m, dtype=bool)]
        return bool(np.all(np.abs(off) <= 1.0))


def latent_corr(spec: CorrelationSpec, i: int, j: int, theta):
    """Latent correlation rho_ij * r(theta; c_ij), shared by both latent
    fields under the tied parameterization."""
    fn = family_function(spec.family)
    rho = spec.rho_matrix[i, j]
    return rho * fn(theta, spec.pair_scale(i, j))
