"""Pair enumeration with 0/1 cutoff weights and the weighted pairwise
composite-likelihood objective.

For m components at n sites the stored pairs are

* marginal pairs (i, i, k, l) with k < l, and
* cross pairs (i, j, k, l) with i < j over all site index combinations,
  including k = l,

each kept only when its geodesic angle is within the cutoff d_ij.  With an
unlimited cutoff the count is m n(n-1)/2 + m(m-1) n^2 / 2.  The objective is
the sum of exact pair log likelihoods over stored pairs (and over
replicates); invalid parameter proposals yield a -inf sentinel rather than
an exception so a derivative-free optimizer can reject and continue.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .corrmodels import family_function
from .errors import ParameterDomainError, ShapeError
from .model import MultivariateObservations, ParameterVector
from .sphere import SiteSet


def _cutoff_matrix(cutoffs, m):
    d = np.asarray(cutoffs, dtype=float)
    if d.ndim == 0:
        d = np.full((m, m), float(d))
    if d.shape != (m, m):
        raise ShapeError(f"cutoff matrix must be {m}x{m} or scalar")
    if np.any(d < 0.0):
        raise ParameterDomainError("cutoff distances must be >= 0")
    if not np.allclose(d, d.T, atol=1e-15):
        raise ParameterDomainError("cutoff matrix must be symmetric")
    return d


@dataclass
class PairSet:
    """Stored positive-weight pairs in (i, j, k, l) lexicographic order."""

    m: int
    n: int
    comp_i: np.ndarray
    comp_j: np.ndarray
    site_k: np.ndarray
    site_l: np.ndarray
    theta: np.ndarray
    cutoffs: np.ndarray
    weight: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.weight is None:
            self.weight = np.ones(len(self.comp_i))

    @property
    def n_pairs(self):
        return len(self.comp_i)

    def subset(self, idx):
        """A new pair set with the pairs selected by ``idx`` (same order)."""
        return PairSet(
            self.m, self.n,
            self.comp_i[idx], self.comp_j[idx],
            self.site_k[idx], self.site_l[idx],
            self.theta[idx], self.cutoffs, self.weight[idx],
        )


def enumerate_pairs(s: SiteSet, m: int, cutoffs) -> PairSet:
    """All pairs with positive cutoff weight, with precomputed angles."""
    if m < 1:
        raise ParameterDomainError("component count must be >= 1")
    n = s.n
    d = _cutoff_matrix(cutoffs, m)
    theta = s.angles()
    iu_k, iu_l = np.triu_indices(n, k=1)
    theta_upper = theta[iu_k, iu_l]

    ii, jj, kk, ll, tt = [], [], [], [], []
    for i in range(m):
        keep = theta_upper <= d[i, i]
        cnt = int(keep.sum())
        ii.append(np.full(cnt, i))
        jj.append(np.full(cnt, i))
        kk.append(iu_k[keep])
        ll.append(iu_l[keep])
        tt.append(theta_upper[keep])
    full_k, full_l = np.divmod(np.arange(n * n), n)
    theta_full = theta[full_k, full_l]
    for i in range(m):
        for j in range(i + 1, m):
            keep = theta_full <= d[i, j]
            cnt = int(keep.sum())
            ii.append(np.full(cnt, i))
            jj.append(np.full(cnt, j))
            kk.append(full_k[keep])
            ll.append(full_l[keep])
            tt.append(theta_full[keep])

    order = _lexsort_pairs(ii, jj, kk, ll)
    comp_i = np.concatenate(ii)[order].astype(np.intp)
    comp_j = np.concatenate(jj)[order].astype(np.intp)
    site_k = np.concatenate(kk)[order].astype(np.intp)
    site_l = np.concatenate(ll)[order].astype(np.intp)
    th = np.concatenate(tt)[order]
    return PairSet(m, n, comp_i, comp_j, site_k, site_l, th, d)


def _lexsort_pairs(ii, jj, kk, ll):
    i = np.concatenate(ii)
    j = np.concatenate(jj)
    k = np.concatenate(kk)
    ln = np.concatenate(ll)
    return np.lexsort((ln, k, j, i))


def pair_inputs(p: ParameterVector, ps: PairSet):
    """Per-pair parameter arrays consumed by the kernel backends."""
    if p.m != ps.m:
        raise ShapeError("parameter vector and pair set disagree on m")
    fn = family_function(p.corr.family)
    i = ps.comp_i
    j = ps.comp_j
    scales = p.corr.scales
    c_pair = 0.5 * (scales[i] + scales[j])
    rho = p.corr.rho_matrix[i, j]
    r = rho * fn(ps.theta, c_pair)
    return (
        p.sigma2[i], p.sigma2[j], p.eta[i], p.eta[j], p.mu[i], p.mu[j], r,
    )


def cl_objective(
    data: MultivariateObservations,
    p: ParameterVector,
    ps: PairSet,
    n_threads: int = 1,
) -> float:
    """Weighted pairwise composite log likelihood over stored pairs.

    Sums over replicates.  The reduction uses compensated partial sums in
    fixed pair order, so the value is reproducible bit for bit for a given
    pair ordering.  Returns -inf when any stored pair reports invalid
    parameters (non-PD 2x2 latent block).
    """
    if data.m != ps.m or data.n != ps.n:
        raise ShapeError(
            f"data shaped (reps={data.n_reps}, m={data.m}, n={data.n}) does "
            f"not match pair set (m={ps.m}, n={ps.n})"
        )
    si2, sj2, ei, ej, mui, muj, r = pair_inputs(p, ps)
    total = 0.0
    for rep in range(data.n_reps):
        vals = data.values[rep]
        a1 = vals[ps.comp_i, ps.site_k] - mui
        a2 = vals[ps.comp_j, ps.site_l] - muj
        s = kernels.cl_accumulate(a1, a2, si2, sj2, ei, ej, r, r,
                                  n_threads=n_threads)
        if np.isnan(s):
            return float("-inf")
        total += s
    return float(total)
