"""Composite-likelihood maximization and sandwich uncertainty.

The objective is maximized with a Nelder-Mead simplex over transformed
coordinates (log for variances and scales, inverse hyperbolic tangent for
the cross correlation, identity elsewhere), so every proposal the optimizer
can reach maps to an admissible parameter vector.  No analytic gradient is
used anywhere; finite differences appear only as convergence diagnostics
and inside the sandwich information estimate, whose outer part comes from a
parametric bootstrap of the score.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .cl import PairSet, enumerate_pairs, pair_inputs
from .corrmodels import CorrelationSpec
from .diagnostics import empirical_semivariogram
from .errors import (
    NoValidStartError,
    NotPositiveDefiniteError,
    ParameterDomainError,
    ShapeError,
)
from .model import MultivariateObservations, ParameterVector, SQRT_2_OVER_PI
from .simulate import simulate_field
from .sphere import SiteSet

# Largest skewness magnitude attainable by the marginal law; used to cap the
# moment-based initializer.
_MAX_MARGINAL_SKEW = 0.9952717464311565

_SCORE_STEP = 1e-5
_SCORE_REL_TOL = 1e-2


@dataclass
class FitOptions:
    """Optimizer settings.

    ``share_scale`` ties the two correlation scales to a single value;
    ``gaussian`` freezes both skewness coefficients at zero (the purely
    Gaussian benchmark fit).
    """

    init: Optional[ParameterVector] = None
    max_iters: int = 5000
    tol: float = 1e-8
    n_starts: int = 1
    seed: int = 0
    share_scale: bool = False
    gaussian: bool = False
    family: str = "exponential"

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ParameterDomainError("tol must be > 0")
        if self.n_starts < 1:
            raise ParameterDomainError("n_starts must be >= 1")


@dataclass
class UncertaintyReport:
    """Sandwich information pieces and the implied standard errors."""

    h: np.ndarray
    j: np.ndarray
    g: Optional[np.ndarray]
    std_errors: Optional[np.ndarray]
    param_names: list
    j_singular: bool = False


@dataclass
class FitResult:
    estimate: ParameterVector
    cl_value: float
    converged: bool
    iters: int
    score_norm: float
    n_pairs: int
    uncertainty: Optional[UncertaintyReport] = None


class ParamPacking:
    """Bijection between a bivariate ParameterVector and a flat vector.

    Transformed layout (full model):
    (log s1, log s2, eta1, eta2, log c1, log c2, atanh rho, mu1, mu2).
    ``share_scale`` collapses the two scale slots into one; ``gaussian``
    removes the eta slots.
    """

    def __init__(self, family: str, share_scale=False, gaussian=False):
        self.family = family
        self.share_scale = share_scale
        self.gaussian = gaussian
        names = ["sigma2_1", "sigma2_2"]
        if not gaussian:
            names += ["eta_1", "eta_2"]
        names += ["c"] if share_scale else ["c_11", "c_22"]
        names += ["rho_12", "mu_1", "mu_2"]
        self.names = names

    @property
    def size(self):
        return len(self.names)

    def _split(self, p: ParameterVector):
        if p.m != 2:
            raise ShapeError("fitting is implemented for the bivariate model")
        return p.sigma2, p.eta, p.corr.scales, p.corr.rho12, p.mu

    def to_vector(self, p: ParameterVector) -> np.ndarray:
        sigma2, eta, scales, rho, mu = self._split(p)
        if not -1.0 < rho < 1.0:
            raise ParameterDomainError("rho_12 must lie in (-1, 1) for fitting")
        out = [math.log(sigma2[0]), math.log(sigma2[1])]
        if not self.gaussian:
            out += [eta[0], eta[1]]
        if self.share_scale:
            out += [math.log(scales[0])]
        else:
            out += [math.log(scales[0]), math.log(scales[1])]
        out += [math.atanh(rho), mu[0], mu[1]]
        return np.array(out)

    def from_vector(self, v) -> ParameterVector:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.size,):
            raise ShapeError(f"expected vector of length {self.size}")
        pos = 0
        sigma2 = np.exp(v[0:2])
        pos = 2
        if self.gaussian:
            eta = np.zeros(2)
        else:
            eta = v[pos : pos + 2].copy()
            pos += 2
        if self.share_scale:
            scales = np.exp([v[pos], v[pos]])
            pos += 1
        else:
            scales = np.exp(v[pos : pos + 2])
            pos += 2
        rho = math.tanh(v[pos])
        mu = v[pos + 1 : pos + 3].copy()
        corr = CorrelationSpec(self.family, scales, rho)
        return ParameterVector(sigma2, eta, mu, corr)

    def natural_vector(self, p: ParameterVector) -> np.ndarray:
        """Untransformed flat vector in the same slot order."""
        sigma2, eta, scales, rho, mu = self._split(p)
        out = [sigma2[0], sigma2[1]]
        if not self.gaussian:
            out += [eta[0], eta[1]]
        out += [scales[0]] if self.share_scale else [scales[0], scales[1]]
        out += [rho, mu[0], mu[1]]
        return np.array(out)

    def from_natural(self, v) -> ParameterVector:
        v = np.asarray(v, dtype=float)
        pos = 2
        sigma2 = v[0:2].copy()
        if self.gaussian:
            eta = np.zeros(2)
        else:
            eta = v[pos : pos + 2].copy()
            pos += 2
        if self.share_scale:
            scales = np.array([v[pos], v[pos]])
            pos += 1
        else:
            scales = v[pos : pos + 2].copy()
            pos += 2
        corr = CorrelationSpec(self.family, scales, float(v[pos]))
        return ParameterVector(sigma2, eta, v[pos + 1 : pos + 3].copy(), corr)


def to_unconstrained(p: ParameterVector, share_scale=False, gaussian=False):
    """Map a bivariate parameter vector to unconstrained coordinates."""
    return ParamPacking(p.corr.family, share_scale, gaussian).to_vector(p)


def from_unconstrained(v, family: str, share_scale=False, gaussian=False):
    """Inverse of :func:`to_unconstrained` (round-trips to 1e-12)."""
    return ParamPacking(family, share_scale, gaussian).from_vector(v)


class _Objective:
    """CL objective with the data gathered once per replicate."""

    def __init__(self, data, ps: PairSet, packing: ParamPacking, n_threads=1):
        if data.m != ps.m or data.n != ps.n:
            raise ShapeError("data does not match the pair set")
        self.ps = ps
        self.packing = packing
        self.n_threads = n_threads
        self.z1 = [data.values[r][ps.comp_i, ps.site_k] for r in range(data.n_reps)]
        self.z2 = [data.values[r][ps.comp_j, ps.site_l] for r in range(data.n_reps)]

    def value(self, p: ParameterVector) -> float:
        si2, sj2, ei, ej, mui, muj, r = pair_inputs(p, self.ps)
        total = 0.0
        for z1, z2 in zip(self.z1, self.z2):
            s = kernels.cl_accumulate(z1 - mui, z2 - muj, si2, sj2, ei, ej,
                                      r, r, n_threads=self.n_threads)
            if math.isnan(s):
                return float("-inf")
            total += s
        return total

    def neg_at(self, v) -> float:
        if not np.all(np.isfinite(v)):
            return float("inf")
        try:
            p = self.packing.from_vector(v)
        except (ParameterDomainError, OverflowError):
            return float("inf")
        val = self.value(p)
        return float("inf") if val == float("-inf") else -val


def default_init(
    data: MultivariateObservations, sites: SiteSet, family: str
) -> ParameterVector:
    """Moment-based starting values.

    Location/variance/skewness come from sample moments inverted through
    the marginal law; the cross coefficient from the empirical collocated
    correlation; the scales from where the empirical correlogram first
    drops below 0.05.
    """
    vals = data.values
    m = data.m
    sigma2 = np.empty(m)
    eta = np.empty(m)
    mu = np.empty(m)
    for i in range(m):
        x = vals[:, i, :].ravel()
        mean = float(np.mean(x))
        var = float(np.var(x))
        sd = math.sqrt(max(var, 1e-12))
        g1 = float(np.mean(((x - mean) / sd) ** 3))
        g1 = max(-_MAX_MARGINAL_SKEW, min(_MAX_MARGINAL_SKEW, g1)) * 0.995
        t = abs(g1) ** (2.0 / 3.0)
        delta_sq = (math.pi / 2.0) * t / (t + ((4.0 - math.pi) / 2.0) ** (2.0 / 3.0))
        delta = math.copysign(math.sqrt(delta_sq), g1)
        omega2 = var / max(1.0 - 2.0 * delta_sq / math.pi, 1e-6)
        eta[i] = delta * math.sqrt(omega2)
        sigma2[i] = max(omega2 * (1.0 - delta_sq), 1e-6)
        mu[i] = mean - eta[i] * SQRT_2_OVER_PI

    if m >= 2:
        z1 = vals[:, 0, :].ravel()
        z2 = vals[:, 1, :].ravel()
        rho = float(np.corrcoef(z1, z2)[0, 1])
        rho = max(-0.9, min(0.9, rho))
    else:
        rho = 0.0

    scales = np.array([
        _correlogram_scale(data, sites, i, family) for i in range(m)
    ])
    return ParameterVector(sigma2, eta, mu, CorrelationSpec(family, scales, rho))


def _correlogram_scale(data, sites, i, family, n_bins=12, max_dist=None):
    max_dist = max_dist or min(math.pi, float(np.max(sites.angles())))
    table = empirical_semivariogram(data, sites, i, i, n_bins, max_dist)
    var = float(np.var(data.values[:, i, :]))
    if var <= 0.0:
        return 0.3
    target = None
    for center, gamma, count in zip(table.bin_center, table.gamma, table.count):
        if count == 0 or not np.isfinite(gamma):
            continue
        if 1.0 - gamma / var < 0.05:
            target = float(center)
            break
    if target is None:
        target = max_dist / 2.0
    if family == "askey":
        # r(theta) = 0.05 at theta/c = 1 - 0.05**(1/4)
        target = target / (1.0 - 0.05**0.25)
    return float(min(max(target, 0.02), math.pi))


def _score_vector(fun, x, steps):
    grad = np.empty(len(x))
    for idx in range(len(x)):
        h = steps[idx]
        e = np.zeros_like(x)
        e[idx] = h
        grad[idx] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return grad


def maximize_cl(
    data: MultivariateObservations,
    sites: SiteSet,
    options: FitOptions,
    cutoffs,
    n_threads: int = 1,
) -> FitResult:
    """Maximize the pairwise composite likelihood (best of ``n_starts``).

    Convergence requires the simplex to contract below ``tol`` and every
    coordinate of the central-difference score at the optimum to be small
    relative to the objective scale.
    """
    ps = enumerate_pairs(sites, data.m, cutoffs)
    if ps.n_pairs == 0:
        raise NoValidStartError("no pairs within the cutoff distances")
    init = options.init or default_init(data, sites, options.family)
    packing = ParamPacking(init.corr.family, options.share_scale, options.gaussian)
    obj = _Objective(data, ps, packing, n_threads=n_threads)
    v0 = packing.to_vector(init)

    starts = [v0]
    rng = np.random.default_rng([int(options.seed), 7919])
    for _ in range(options.n_starts - 1):
        starts.append(v0 + rng.normal(0.0, 0.3, size=v0.shape))

    best = None
    any_valid = False
    for v_start in starts:
        if not np.isfinite(obj.neg_at(v_start)):
            continue
        any_valid = True
        res = minimize(
            obj.neg_at,
            v_start,
            method="Nelder-Mead",
            options={
                "maxiter": options.max_iters,
                "xatol": options.tol,
                "fatol": options.tol,
            },
        )
        if best is None or res.fun < best.fun:
            best = res
    if not any_valid:
        raise NoValidStartError("every start landed in the -inf region")

    x_opt = best.x
    steps = np.full(len(x_opt), _SCORE_STEP)
    grad = _score_vector(lambda v: -obj.neg_at(v), x_opt, steps)
    score_norm = float(np.max(np.abs(grad)))
    cl_value = -float(best.fun)
    converged = bool(best.success) and score_norm <= _SCORE_REL_TOL * max(
        1.0, abs(cl_value)
    )
    return FitResult(
        estimate=packing.from_vector(x_opt),
        cl_value=cl_value,
        converged=converged,
        iters=int(best.nit),
        score_norm=score_norm,
        n_pairs=ps.n_pairs,
    )


def godambe(
    data: MultivariateObservations,
    sites: SiteSet,
    estimate: ParameterVector,
    cutoffs,
    n_boot: int = 100,
    seed: int = 0,
    share_scale: bool = False,
    gaussian: bool = False,
    n_threads: int = 1,
) -> UncertaintyReport:
    """Sandwich information at the estimate.

    The bread is the negated finite-difference Hessian of the objective on
    the observed data; the meat is the second moment of finite-difference
    scores over ``n_boot`` parametric-bootstrap replicates simulated at the
    estimate.  Standard errors are the square roots of the diagonal of the
    inverse sandwich matrix; a singular score moment is flagged instead of
    inverted.
    """
    ps = enumerate_pairs(sites, data.m, cutoffs)
    packing = ParamPacking(estimate.corr.family, share_scale, gaussian)
    x0 = packing.natural_vector(estimate)
    p_dim = len(x0)

    def cl_at(x, payload):
        try:
            p = packing.from_natural(x)
        except ParameterDomainError:
            return float("-inf")
        return payload.value(p)

    obs_obj = _Objective(data, ps, packing, n_threads=n_threads)
    steps = _natural_steps(x0, packing, 1e-4)

    # Bread: central second differences, negated, symmetric by construction.
    h = np.empty((p_dim, p_dim))
    f0 = cl_at(x0, obs_obj)
    for a in range(p_dim):
        ea = np.zeros(p_dim)
        ea[a] = steps[a]
        h[a, a] = -(cl_at(x0 + ea, obs_obj) - 2.0 * f0 + cl_at(x0 - ea, obs_obj)) / (
            steps[a] ** 2
        )
        for b in range(a + 1, p_dim):
            eb = np.zeros(p_dim)
            eb[b] = steps[b]
            mixed = (
                cl_at(x0 + ea + eb, obs_obj)
                - cl_at(x0 + ea - eb, obs_obj)
                - cl_at(x0 - ea + eb, obs_obj)
                + cl_at(x0 - ea - eb, obs_obj)
            ) / (4.0 * steps[a] * steps[b])
            h[a, b] = -mixed
            h[b, a] = -mixed

    # Meat: score second moment across bootstrap datasets that mirror the
    # observed design (same replicate count, so H and J share their scale).
    # A pairwise estimate need not be jointly simulable (only 2x2 blocks
    # were checked); flag that instead of failing.
    n_reps = data.n_reps
    j = np.zeros((p_dim, p_dim))
    try:
        boot = simulate_field(estimate, sites, n_boot * n_reps, seed=seed)
    except NotPositiveDefiniteError:
        return UncertaintyReport(h, j, None, None, packing.names,
                                 j_singular=True)
    score_steps = _natural_steps(x0, packing, _SCORE_STEP)
    for b in range(n_boot):
        rep_data = MultivariateObservations(
            boot.values[b * n_reps : (b + 1) * n_reps]
        )
        rep_obj = _Objective(rep_data, ps, packing, n_threads=n_threads)
        s = _score_vector(lambda x: cl_at(x, rep_obj), x0, score_steps)
        if not np.all(np.isfinite(s)):
            return UncertaintyReport(h, j, None, None, packing.names,
                                     j_singular=True)
        j += np.outer(s, s)
    j /= n_boot

    names = packing.names
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(j))):
        return UncertaintyReport(h, j, None, None, names, j_singular=True)
    try:
        j_inv = np.linalg.inv(j)
    except np.linalg.LinAlgError:
        return UncertaintyReport(h, j, None, None, names, j_singular=True)
    g = h @ j_inv @ h.T
    try:
        g_inv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        return UncertaintyReport(h, j, g, None, names, j_singular=True)
    diag = np.diag(g_inv)
    if np.any(diag <= 0.0):
        return UncertaintyReport(h, j, g, None, names, j_singular=True)
    return UncertaintyReport(h, j, g, np.sqrt(diag), names)


def _natural_steps(x0, packing: ParamPacking, base):
    """Per-coordinate steps that stay inside the natural domain."""
    steps = base * np.maximum(1.0, np.abs(x0))
    for idx, name in enumerate(packing.names):
        if name.startswith(("sigma2", "c")):
            steps[idx] = min(steps[idx], 0.25 * x0[idx])
        elif name.startswith("rho"):
            steps[idx] = min(steps[idx], 0.25 * (1.0 - abs(x0[idx])))
        steps[idx] = max(steps[idx], 1e-10)
    return steps
