"""Spherical geometry: sites, geodesic distance and lon-lat grids.

All internal math lives on the unit sphere in radians.  A physical radius
(e.g. kilometers) only ever scales distances for display and I/O.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateSiteError, ParameterDomainError

# Two sites closer than this geodesic angle are considered duplicates.
DUPLICATE_TOL = 1e-10


def _unit_vector(lon_deg, lat_deg):
    lon = np.deg2rad(lon_deg)
    lat = np.deg2rad(lat_deg)
    return np.array(
        [np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)]
    )


@dataclass(frozen=True)
class Site:
    """A point on the unit sphere given as longitude/latitude in degrees.

    Longitude is normalized into [-180, 180); latitude must lie in
    [-90, 90].  ``unit_vec`` is derived and has Euclidean norm 1.
    """

    lon: float
    lat: float
    unit_vec: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ParameterDomainError(f"latitude {self.lat} outside [-90, 90]")
        lon = ((self.lon + 180.0) % 360.0) - 180.0
        object.__setattr__(self, "lon", float(lon))
        object.__setattr__(self, "lat", float(self.lat))
        object.__setattr__(self, "unit_vec", _unit_vector(lon, self.lat))


def geodesic(a: Site, b: Site) -> float:
    """Great-circle angle between two sites, in radians within [0, pi].

    The dot product is clamped to [-1, 1] before the arccos so identical or
    antipodal points cannot produce NaN; coincident unit vectors return an
    exact zero (arccos alone cannot resolve angles below ~1e-8).
    """
    if np.array_equal(a.unit_vec, b.unit_vec):
        return 0.0
    dot = float(np.dot(a.unit_vec, b.unit_vec))
    return float(np.arccos(min(1.0, max(-1.0, dot))))


class SiteSet:
    """Ordered collection of distinct sites with cached geometry.

    Rejects construction when any two sites are within ``DUPLICATE_TOL``
    geodesic radians of each other.
    """

    def __init__(self, sites):
        sites = list(sites)
        if not sites:
            raise ParameterDomainError("a site set needs at least one site")
        self.sites = sites
        self.unit_vecs = np.array([s.unit_vec for s in sites])
        self._check_duplicates()
        self._angles = None

    def _check_duplicates(self, block=512):
        u = self.unit_vecs
        n = len(self.sites)
        # Chord-length test; for tiny angles chord ~= angle so the squared
        # threshold matches the geodesic tolerance.
        tol_sq = DUPLICATE_TOL**2
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            d = u[lo:hi, None, :] - u[None, :, :]
            dist_sq = np.einsum("ijk,ijk->ij", d, d)
            rows, cols = np.nonzero(dist_sq < tol_sq)
            for r, c in zip(rows, cols):
                if lo + r != c and lo + r < c:
                    raise DuplicateSiteError(
                        f"sites {lo + r} and {c} are closer than {DUPLICATE_TOL} rad"
                    )

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __getitem__(self, idx):
        return self.sites[idx]

    @property
    def n(self):
        return len(self.sites)

    def angles(self):
        """Pairwise geodesic angle matrix (n x n), cached."""
        if self._angles is None:
            dots = np.clip(self.unit_vecs @ self.unit_vecs.T, -1.0, 1.0)
            self._angles = np.arccos(dots)
            np.fill_diagonal(self._angles, 0.0)
        return self._angles

    def angles_to(self, site: Site):
        """Geodesic angles from every site in the set to ``site``."""
        dots = np.clip(self.unit_vecs @ site.unit_vec, -1.0, 1.0)
        return np.arccos(dots)

    @classmethod
    def from_lonlat(cls, lons, lats):
        return cls([Site(float(lo), float(la)) for lo, la in zip(lons, lats)])


def lonlat_grid(n_lon: int, n_lat: int, lat_min: float, lat_max: float) -> SiteSet:
    """Regular grid: equispaced longitudes over the full circle (without the
    wrap-around duplicate) crossed with equispaced latitudes in
    [lat_min, lat_max].

    Grids whose rows collapse to a single point (e.g. lat = +-90) raise a
    duplicate-site error.
    """
    if n_lon < 1 or n_lat < 1:
        raise ParameterDomainError("grid sizes must be >= 1")
    if not lat_min < lat_max and n_lat > 1:
        raise ParameterDomainError("lat_min must be < lat_max")
    lons = np.linspace(-180.0, 180.0, n_lon, endpoint=False)
    lats = np.linspace(lat_min, lat_max, n_lat) if n_lat > 1 else np.array([lat_min])
    grid_lons = np.repeat(lons, len(lats))
    grid_lats = np.tile(lats, len(lons))
    return SiteSet.from_lonlat(grid_lons, grid_lats)


def random_sites(n: int, seed: int = 0) -> SiteSet:
    """Uniform random sites on the sphere (area-uniform), reproducible."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, n)
    lon = rng.uniform(-180.0, 180.0, n)
    lat = np.rad2deg(np.arcsin(z))
    return SiteSet.from_lonlat(lon, lat)


def random_cap_sites(n: int, cap_radius: float, seed: int = 0) -> SiteSet:
    """Uniform random sites within a polar spherical cap of the given
    geodesic radius (radians).  Handy for dense, short-range designs."""
    rng = np.random.default_rng(seed)
    z = 1.0 - rng.uniform(0.0, 1.0, n) * (1.0 - np.cos(cap_radius))
    lon = rng.uniform(-180.0, 180.0, n)
    lat = np.rad2deg(np.arcsin(z))
    return SiteSet.from_lonlat(lon, lat)
