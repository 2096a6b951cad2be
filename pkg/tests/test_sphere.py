import math

import numpy as np
import pytest

from skewsphere import Site, SiteSet, geodesic, lonlat_grid, random_sites
from skewsphere.errors import DuplicateSiteError, ParameterDomainError


def test_unit_vector_definition():
    s = Site(30.0, 45.0)
    lon, lat = math.radians(30.0), math.radians(45.0)
    expected = np.array([
        math.cos(lat) * math.cos(lon),
        math.cos(lat) * math.sin(lon),
        math.sin(lat),
    ])
    assert np.allclose(s.unit_vec, expected, atol=1e-15)
    assert abs(np.linalg.norm(s.unit_vec) - 1.0) < 1e-12


def test_lon_normalized_lat_validated():
    assert Site(190.0, 0.0).lon == -170.0
    assert Site(-180.0, 0.0).lon == -180.0
    with pytest.raises(ParameterDomainError):
        Site(0.0, 91.0)


def test_geodesic_reference_points():
    assert geodesic(Site(10.0, 20.0), Site(10.0, 20.0)) == 0.0
    assert geodesic(Site(0.0, 0.0), Site(180.0, 0.0)) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic(Site(0.0, 0.0), Site(90.0, 0.0)) == pytest.approx(math.pi / 2, abs=1e-15)


def test_geodesic_metric_properties(rng):
    sites = [Site(lon, lat) for lon, lat in
             zip(rng.uniform(-180, 180, 60), rng.uniform(-89, 89, 60))]
    for _ in range(300):
        a, b, c = rng.choice(len(sites), 3, replace=False)
        dab = geodesic(sites[a], sites[b])
        dba = geodesic(sites[b], sites[a])
        assert dab == dba  # symmetric bit for bit
        assert 0.0 <= dab <= math.pi
        assert dab <= geodesic(sites[a], sites[c]) + geodesic(sites[c], sites[b]) + 1e-12


def test_geodesic_near_parallel_vectors():
    a = Site(10.0, 10.0)
    b = Site(10.0 + 1e-9, 10.0)
    d = geodesic(a, b)
    assert 0.0 <= d <= math.pi
    assert d < 1e-7


@pytest.mark.parametrize(
    "n_lon,n_lat,expected",
    [(17, 17, 289), (9, 9, 81), (13, 13, 169)],
)
def test_grid_counts(n_lon, n_lat, expected):
    grid = lonlat_grid(n_lon, n_lat, -80.0, 80.0)
    assert grid.n == expected


def test_grid_single_site():
    grid = lonlat_grid(1, 1, 0.0, 1.0)
    assert grid.n == 1
    assert grid[0].lat == 0.0


def test_grid_polar_rows_rejected():
    with pytest.raises(DuplicateSiteError):
        lonlat_grid(5, 3, -90.0, 90.0)


def test_duplicate_sites_rejected():
    with pytest.raises(DuplicateSiteError):
        SiteSet([Site(10.0, 10.0), Site(10.0, 10.0)])


def test_grid_longitudes_do_not_wrap():
    grid = lonlat_grid(4, 1, 0.0, 1.0)
    lons = sorted(s.lon for s in grid)
    assert lons == [-180.0, -90.0, 0.0, 90.0]


def test_angle_matrix_matches_pairwise():
    grid = lonlat_grid(5, 4, -60.0, 60.0)
    theta = grid.angles()
    assert theta.shape == (20, 20)
    for k in (0, 7, 13):
        for l in (2, 11, 19):
            assert theta[k, l] == pytest.approx(geodesic(grid[k], grid[l]), abs=1e-14)


def test_random_sites_reproducible():
    a = random_sites(50, seed=7)
    b = random_sites(50, seed=7)
    assert np.array_equal(a.unit_vecs, b.unit_vecs)
