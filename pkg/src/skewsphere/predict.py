"""Simple cokriging with the model mean and covariance, plus drop-one
cross-validation scores.

The predictor is the best linear unbiased one given the model moments: it
plugs in the known marginal means and the joint covariance, which makes it
optimal for the Gaussian submodel and a deliberate linear benchmark for the
skewed case.  Drop-one prediction reuses a single factorization of the full
joint covariance: with precision matrix P, leaving coordinate q out gives

    prediction = z_q - [P (z - mean)]_q / P_qq,    variance = 1 / P_qq.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError, NumericalDegeneracyError, ShapeError
from .model import MultivariateObservations, ParameterVector, cov, joint_moments, marginal_mean
from .sphere import Site, SiteSet, geodesic

_EXACT_MATCH_TOL = 1e-10


def cokrige(
    p: ParameterVector,
    obs_sites: SiteSet,
    obs: MultivariateObservations,
    target_site: Site,
    target_component: int,
):
    """Predict one component at a target site from all observations.

    Returns (prediction, variance).  If the target coincides with an
    observed site (within the duplicate tolerance) for the same component,
    the observation is reproduced exactly with zero variance.
    """
    if obs.n_reps != 1:
        raise ShapeError("cokriging consumes a single replicate")
    if obs.m != p.m or obs.n != obs_sites.n:
        raise ShapeError("observations do not match sites/components")

    angles = obs_sites.angles_to(target_site)
    hit = np.nonzero(angles < _EXACT_MATCH_TOL)[0]
    if hit.size:
        return float(obs.values[0, target_component, hit[0]]), 0.0

    mean, cov_mat = joint_moments(p, obs_sites)
    z = obs.values[0].reshape(-1)  # component-major, matching joint_moments
    n = obs_sites.n
    c_vec = np.concatenate(
        [cov(p, target_component, j, angles) for j in range(p.m)]
    )
    try:
        chol = np.linalg.cholesky(cov_mat)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "observation covariance is not positive definite"
        ) from None
    w = _chol_solve(chol, c_vec)
    m_t = marginal_mean(p, target_component)
    prediction = m_t + float(w @ (z - mean))
    variance = float(cov(p, target_component, target_component, 0.0) - w @ c_vec)
    return prediction, max(variance, 0.0)


def _chol_solve(chol, rhs):
    return np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))


@dataclass
class DropOneResult:
    rmspe: float
    lscore: float
    table: np.ndarray  # columns: site index, component, observed, predicted, variance


def drop_one_scores(
    p: ParameterVector, s: SiteSet, obs: MultivariateObservations
) -> DropOneResult:
    """Leave-one-out prediction of every (component, site) observation.

    Each point is predicted from all remaining observations (the other
    component at the same site included).  RMSPE is the root mean squared
    prediction error over the m*n points; LSCORE the average Gaussian
    predictive log score.
    """
    if obs.n_reps != 1:
        raise ShapeError("drop-one consumes a single replicate")
    if s.n < 2:
        raise ShapeError("drop-one needs at least two sites")
    mean, cov_mat = joint_moments(p, s)
    z = obs.values[0].reshape(-1)
    try:
        chol = np.linalg.cholesky(cov_mat)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "observation covariance is not positive definite"
        ) from None
    precision = _chol_solve(chol, np.eye(len(z)))
    weighted = precision @ (z - mean)

    m, n = obs.m, obs.n
    rows = np.empty((m * n, 5))
    sq_sum = 0.0
    log_sum = 0.0
    for q in range(m * n):
        p_qq = precision[q, q]
        if p_qq <= 0.0:
            raise NumericalDegeneracyError(
                f"non-positive drop-one precision at point {q}"
            )
        pred = z[q] - weighted[q] / p_qq
        var = 1.0 / p_qq
        err = z[q] - pred
        sq_sum += err * err
        log_sum += 0.5 * np.log(2.0 * np.pi * var) + err * err / (2.0 * var)
        comp, site = divmod(q, n)
        rows[q] = (site, comp, z[q], pred, var)
    # one leave-out solve per observation, nothing skipped or repeated
    assert rows.shape[0] == m * n
    return DropOneResult(
        rmspe=float(np.sqrt(sq_sum / (m * n))),
        lscore=float(log_sum / (m * n)),
        table=rows,
    )
