import math

import numpy as np
import pytest

from _oracles import bvn_cdf_quadrature, norm_cdf, phi2_density
from skewsphere.bvn import Cov2, norm_pdf, phi2_cdf, phi2_logpdf, phi2_pdf, std_bvn_cdf
from skewsphere.errors import NotPositiveDefiniteError


def test_cov2_pd_checked_on_construction():
    Cov2(1.0, 0.5, 1.0)
    with pytest.raises(NotPositiveDefiniteError):
        Cov2(1.0, 1.1, 1.0)
    with pytest.raises(NotPositiveDefiniteError):
        Cov2(-1.0, 0.0, 1.0)


def test_phi2_pdf_reference_values():
    assert phi2_pdf((0.0, 0.0), Cov2(1.0, 0.0, 1.0)) == pytest.approx(
        1.0 / (2.0 * math.pi), abs=1e-16
    )


def test_phi2_pdf_factorizes_when_uncorrelated(rng):
    for _ in range(50):
        y1, y2 = rng.normal(0, 2, 2)
        expected = norm_pdf(y1) * norm_pdf(y2)
        assert phi2_pdf((y1, y2), Cov2(1.0, 0.0, 1.0)) == pytest.approx(
            expected, rel=1e-14
        )


def test_phi2_pdf_matches_direct_formula(rng):
    sigma = Cov2(1.0, 0.5, 1.0)
    assert phi2_pdf((1.0, -1.0), sigma) == pytest.approx(
        phi2_density(1.0, -1.0, 1.0, 0.5, 1.0), rel=1e-14
    )
    for _ in range(50):
        a, b = rng.uniform(0.3, 2.0, 2)
        c = rng.uniform(-0.9, 0.9) * math.sqrt(a * b)
        y1, y2 = rng.normal(0, 2, 2)
        assert phi2_pdf((y1, y2), Cov2(a, c, b)) == pytest.approx(
            phi2_density(y1, y2, a, c, b), rel=1e-13
        )


def test_cdf_quarter_plane(backend):
    assert backend.bvn_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-14)


def test_cdf_origin_closed_form(backend):
    for rho in (-0.95, -0.8, -0.3, 0.0, 0.2, 0.5, 0.8, 0.99):
        expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
        assert backend.bvn_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-12)
    assert std_bvn_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_cdf_tail_saturation(backend):
    for rho in (-0.7, 0.0, 0.7):
        assert backend.bvn_cdf(8.0, 8.0, rho) == pytest.approx(1.0, abs=1e-12)
        assert backend.bvn_cdf(-8.0, 1.0, rho) == pytest.approx(0.0, abs=1e-12)


def test_cdf_against_quadrature_oracle(backend, rng):
    for _ in range(60):
        rho = rng.uniform(-0.999, 0.999)
        b1, b2 = rng.normal(0.0, 1.5, 2)
        expected = bvn_cdf_quadrature(b1, b2, rho)
        assert backend.bvn_cdf(b1, b2, rho) == pytest.approx(expected, abs=1e-10)


def test_cdf_monotone_in_each_argument(backend, rng):
    for _ in range(100):
        rho = rng.uniform(-0.99, 0.99)
        b1, b2 = rng.normal(0.0, 2.0, 2)
        d1, d2 = rng.uniform(0.0, 1.0, 2)
        base = backend.bvn_cdf(b1, b2, rho)
        assert backend.bvn_cdf(b1 + d1, b2, rho) >= base - 1e-15
        assert backend.bvn_cdf(b1, b2 + d2, rho) >= base - 1e-15


def test_cdf_reflection_identity(backend, rng):
    for _ in range(200):
        rho = rng.uniform(-0.99, 0.99)
        b1, b2 = rng.normal(0.0, 1.5, 2)
        lhs = backend.bvn_cdf(b1, b2, rho)
        rhs = norm_cdf(b1) - backend.bvn_cdf(b1, -b2, -rho)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_cdf_near_unit_correlation_limits(backend, rng):
    for _ in range(50):
        b1, b2 = rng.normal(0.0, 1.5, 2)
        hi = backend.bvn_cdf(b1, b2, 1.0 - 1e-9)
        assert hi == pytest.approx(norm_cdf(min(b1, b2)), abs=1e-8)
        lo = backend.bvn_cdf(b1, b2, -1.0 + 1e-9)
        assert lo == pytest.approx(max(0.0, norm_cdf(b1) + norm_cdf(b2) - 1.0), abs=1e-8)


def test_cdf_degenerate_correlation_exact(backend):
    assert backend.bvn_cdf(0.3, 1.2, 1.0) == pytest.approx(norm_cdf(0.3), abs=1e-15)
    assert backend.bvn_cdf(0.3, 1.2, 1.0 - 1e-13) == pytest.approx(
        norm_cdf(0.3), abs=1e-15
    )
    assert backend.bvn_cdf(0.3, 1.2, -1.0) == pytest.approx(
        max(0.0, norm_cdf(0.3) + norm_cdf(1.2) - 1.0), abs=1e-15
    )


def test_cdf_exchange_symmetry_exact(backend, rng):
    for _ in range(200):
        rho = rng.uniform(-0.999, 0.999)
        b1, b2 = rng.normal(0.0, 2.0, 2)
        assert backend.bvn_cdf(b1, b2, rho) == backend.bvn_cdf(b2, b1, rho)


def test_phi2_cdf_general_covariance(rng):
    # standardized by hand: P(U <= l) with covariance diag scaling
    sigma = Cov2(4.0, 0.8, 1.0)
    l = (1.0, -0.5)
    expected = std_bvn_cdf(1.0 / 2.0, -0.5, 0.8 / 2.0)
    assert phi2_cdf(l, sigma) == pytest.approx(expected, abs=1e-15)


def test_std_bvn_cdf_vectorized(backend):
    b1 = np.array([0.0, 1.0, -1.0])
    b2 = np.array([0.0, -0.3, 2.0])
    rho = np.array([0.5, -0.2, 0.9])
    many = backend.bvn_cdf_many(b1, b2, rho)
    for idx in range(3):
        assert many[idx] == backend.bvn_cdf(b1[idx], b2[idx], rho[idx])


def test_phi2_logpdf_singular_raises():
    with pytest.raises(NotPositiveDefiniteError):
        phi2_logpdf((0.0, 0.0), np.array([[1.0, 1.0], [1.0, 1.0]]))
