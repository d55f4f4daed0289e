"""Conditional densities of the uniform sphere distribution on a great circle.

The conditioning set is the meridian great circle through longitude 0 (and
longitude pi on the far side).  Two families of positive-area bands shrink onto
that circle:

* ``WEDGE`` — all points within a longitude half-width of the meridian.  The
  area element factorizes, so the conditional of latitude is ``cos(theta)/2``
  on the half-meridian for *every* half-width.
* ``TUBE`` — all points within a geodesic half-width of the meridian plane,
  i.e. ``|arcsin(p . n)| <= half_width`` with ``n`` the unit normal of the
  plane.  The finite-width marginal is computed exactly here and converges to
  the arclength-uniform density as the half-width shrinks.

The two limits disagree on the same null set; both are exposed analytically
and as Monte Carlo histograms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptyBandError
from .grids import GriddedDensity, edge_centers, from_cell_masses, histogram_density, regular_edges


class BandGeometry(Enum):
    WEDGE = "wedge"
    TUBE = "tube"


class CircleDomain(Enum):
    """Coordinate domain of the conditioned circle.

    ``HALF_MERIDIAN`` keeps only the longitude-0 half; the coordinate is the
    latitude on [-pi/2, pi/2].  ``FULL_CIRCLE`` covers the whole great circle
    with a signed arclength coordinate on [-pi, pi): latitude on the near half,
    reflected latitude on the far half.
    """

    HALF_MERIDIAN = "half_meridian"
    FULL_CIRCLE = "full_circle"


@dataclass(frozen=True)
class SphericalPoint:
    """A point on the unit sphere: latitude `theta`, longitude `phi` (radians)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not -math.pi / 2 <= self.theta <= math.pi / 2:
            raise ValueError("theta must lie in [-pi/2, pi/2]")
        if not -math.pi <= self.phi < math.pi:
            raise ValueError("phi must lie in [-pi, pi)")

    def unit_vector(self) -> np.ndarray:
        ct = math.cos(self.theta)
        return np.array([ct * math.cos(self.phi), ct * math.sin(self.phi), math.sin(self.theta)])


@dataclass(frozen=True)
class SphereSample:
    """A batch of sphere points stored as coordinate arrays.

    Behaves as a sequence of :class:`SphericalPoint` while keeping the
    vectorized `theta`/`phi` arrays available for histogramming.
    """

    theta: np.ndarray
    phi: np.ndarray

    def __len__(self) -> int:
        return len(self.theta)

    def __getitem__(self, i: int) -> SphericalPoint:
        return SphericalPoint(float(self.theta[i]), float(self.phi[i]))

    def __iter__(self):
        for t, p in zip(self.theta, self.phi):
            yield SphericalPoint(float(t), float(p))


def sample_uniform_sphere(n: int, seed, workers: int = 1) -> SphereSample:
    """Draw `n` i.i.d. area-uniform points on the unit sphere.

    Sampling is exact and rejection-free: ``sin(theta)`` is uniform on
    [-1, 1] and `phi` is uniform on [-pi, pi).  The sample count is split
    over `workers` partitions with independently derived child seeds, so the
    result is reproducible for a fixed partition plan ``(n, seed, workers)``
    regardless of how the partitions are executed.

    Parameters
    ----------
    n:
        Number of points, >= 0.
    seed:
        Integer seed or a ``numpy.random.SeedSequence``.
    workers:
        Number of partitions in the plan (default 1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(workers)
    base, extra = divmod(n, workers)
    thetas = []
    phis = []
    for w, child in enumerate(children):
        count = base + (1 if w < extra else 0)
        rng = np.random.Generator(np.random.PCG64(child))
        z = rng.uniform(-1.0, 1.0, count)
        phi = rng.uniform(-np.pi, np.pi, count)
        thetas.append(np.arcsin(z))
        phis.append(phi)
    return SphereSample(theta=np.concatenate(thetas), phi=np.concatenate(phis))


def _as_theta_phi(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, SphereSample):
        return points.theta, points.phi
    pts = list(points)
    theta = np.array([p.theta for p in pts], dtype=float)
    phi = np.array([p.phi for p in pts], dtype=float)
    return theta, phi


@dataclass(frozen=True)
class GreatCircleBand:
    """A positive-area band around the meridian great circle."""

    geometry: BandGeometry
    half_width: float
    domain: CircleDomain

    def __post_init__(self):
        if not 0.0 < self.half_width < math.pi / 2:
            raise ValueError("half_width must satisfy 0 < half_width < pi/2")

    def contains(self, theta, phi):
        """Vectorized membership test."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if self.geometry is BandGeometry.WEDGE:
            # canonical longitudes pass through unwrapped so the closed
            # boundary |phi| == half_width is honored exactly
            canonical = (phi >= -np.pi) & (phi < np.pi)
            wrapped = np.where(canonical, phi, np.remainder(phi + np.pi, 2.0 * np.pi) - np.pi)
            dist0 = np.abs(wrapped)
            inside = dist0 <= self.half_width
            if self.domain is CircleDomain.FULL_CIRCLE:
                inside = inside | (np.pi - dist0 <= self.half_width)
            return inside
        # Tube: geodesic distance to the meridian plane (normal along +y).
        geodesic = np.abs(np.arcsin(np.clip(np.cos(theta) * np.sin(phi), -1.0, 1.0)))
        inside = geodesic <= self.half_width
        if self.domain is CircleDomain.HALF_MERIDIAN:
            inside = inside & (np.cos(phi) >= 0.0)
        return inside

    def circle_coordinate(self, theta, phi):
        """Map in-band points to the 1-D circle coordinate.

        On the half-meridian this is the latitude itself.  On the full circle,
        points on the far half (``cos(phi) < 0``) continue past the pole:
        ``theta -> pi - theta`` for the upper branch and ``-pi - theta`` for
        the lower one, giving a coordinate on [-pi, pi).
        """
        theta = np.asarray(theta, dtype=float)
        if self.domain is CircleDomain.HALF_MERIDIAN:
            return theta
        phi = np.asarray(phi, dtype=float)
        far = np.where(theta >= 0.0, np.pi - theta, -np.pi - theta)
        c = np.where(np.cos(phi) >= 0.0, theta, far)
        return np.where(c == np.pi, -np.pi, c)

    def coordinate_interval(self) -> tuple[float, float]:
        if self.domain is CircleDomain.HALF_MERIDIAN:
            return (-math.pi / 2, math.pi / 2)
        return (-math.pi, math.pi)


def _domain_interval(domain: CircleDomain) -> tuple[float, float]:
    if domain is CircleDomain.HALF_MERIDIAN:
        return (-math.pi / 2, math.pi / 2)
    return (-math.pi, math.pi)


def _grid_edges(domain: CircleDomain, theta_grid) -> np.ndarray:
    """Edges for either a cell count or an explicit array of cell centers."""
    lo, hi = _domain_interval(domain)
    if np.isscalar(theta_grid):
        return regular_edges(lo, hi, int(theta_grid))
    centers = np.asarray(theta_grid, dtype=float)
    if centers.ndim != 1 or len(centers) < 1:
        raise ValueError("theta_grid must be a cell count or a 1-D array of cell centers")
    if len(centers) == 1:
        width = hi - lo
    else:
        widths = np.diff(centers)
        width = widths[0]
        if not np.allclose(widths, width, rtol=0.0, atol=1e-12):
            raise ValueError("cell centers must be equally spaced")
    edges = np.concatenate(([centers[0] - width / 2], centers + width / 2))
    if abs(edges[0] - lo) > 1e-9 or abs(edges[-1] - hi) > 1e-9:
        raise ValueError("grid must cover the full band domain")
    edges[0], edges[-1] = lo, hi
    return edges


# --- wedge marginal ---------------------------------------------------------
#
# The wedge band area element factorizes into d(phi) * cos(theta) d(theta), so
# the latitude marginal is cos(theta)/2 on the half-meridian independent of the
# half-width; over the full circle the reflected coordinate gives |cos(c)|/4.


def _abs_cos_cumulative(c):
    """Integral of |cos| from 0 to c for |c| <= pi (odd in c)."""
    c = np.asarray(c, dtype=float)
    mag = np.abs(c)
    body = np.sin(mag)
    cap = 2.0 - np.sin(mag)
    return np.sign(c) * np.where(mag <= np.pi / 2, body, cap)


# --- tube marginal ----------------------------------------------------------
#
# With k = sin(half_width), a point at circle coordinate c contributes the
# longitude arc where |cos(theta) sin(phi)| <= k.  The unnormalized marginal is
#
#   u(c) = |cos c| * min(2 * arcsin(min(1, k / |cos c|)), pi)
#
# which is 2k + O(k^2) away from the poles (uniform limit) and |cos c| * pi
# inside the polar caps.  Its exact antiderivative is implemented below and is
# used for cell masses; total mass over the full circle is 4 * pi * k.


def _tube_integrand(c, k: float):
    c = np.asarray(c, dtype=float)
    cc = np.abs(np.cos(c))
    with np.errstate(divide="ignore"):
        angle = 2.0 * np.arcsin(np.minimum(1.0, k / np.where(cc > 0, cc, np.inf)))
    return cc * np.where(cc > k, angle, np.pi)


def _tube_quarter_cumulative(c, k: float):
    """Integral of the tube integrand from 0 to c, for c in [0, pi/2]."""
    c = np.asarray(c, dtype=float)
    a = math.sqrt(1.0 - k * k)
    c_k = math.acos(k)  # boundary between the body and the polar cap
    s = np.sin(np.minimum(c, c_k))
    cos_c = np.cos(np.minimum(c, c_k))
    body = 2.0 * (
        s * np.arcsin(np.minimum(k / cos_c, 1.0))
        + k * np.arcsin(np.minimum(s / a, 1.0))
        - np.arctan2(k * s, np.sqrt(np.maximum(a * a - s * s, 0.0)))
    )
    body_at_ck = (a + k - 1.0) * math.pi  # exact value of the body integral at c_k
    cap = body_at_ck + np.pi * (np.sin(c) - a)
    # the seam itself goes to the cap branch: the body expression loses
    # ~sqrt(eps)/k digits there to cancellation in a^2 - sin(c)^2
    return np.where(c < c_k, body, cap)


def _tube_cumulative(c, k: float):
    """Integral of the tube integrand from 0 to c for |c| <= pi (odd in c)."""
    c = np.asarray(c, dtype=float)
    mag = np.abs(c)
    quarter = _tube_quarter_cumulative(np.minimum(mag, np.pi / 2), k)
    beyond = 2.0 * k * np.pi - _tube_quarter_cumulative(np.maximum(np.pi - mag, 0.0), k)
    return np.sign(c) * np.where(mag <= np.pi / 2, quarter, beyond)


def analytic_band_conditional(band: GreatCircleBand, theta_grid) -> GriddedDensity:
    """Exact conditional density of the uniform sphere law on the band's circle.

    Parameters
    ----------
    band:
        Band geometry, half-width, and coordinate domain.
    theta_grid:
        Either a cell count or an array of equally spaced cell centers
        covering the band domain.

    Returns
    -------
    GriddedDensity
        Center values are pointwise exact; cell measures absorb the exact cell
        masses so the density integrates to one at any resolution.
    """
    edges = _grid_edges(band.domain, theta_grid)
    centers = edge_centers(edges)
    half = band.domain is CircleDomain.HALF_MERIDIAN
    if band.geometry is BandGeometry.WEDGE:
        if half:
            values = np.cos(centers) / 2.0
            masses = (np.sin(edges[1:]) - np.sin(edges[:-1])) / 2.0
        else:
            values = np.abs(np.cos(centers)) / 4.0
            cum = _abs_cos_cumulative(edges)
            masses = (cum[1:] - cum[:-1]) / 4.0
    else:
        k = math.sin(band.half_width)
        norm = (2.0 if half else 4.0) * math.pi * k
        values = _tube_integrand(centers, k) / norm
        cum = _tube_cumulative(edges, k)
        masses = (cum[1:] - cum[:-1]) / norm
    return from_cell_masses(edges, values, masses)


def limit_conditional(geometry: BandGeometry, domain: CircleDomain, theta_grid) -> GriddedDensity:
    """Shrinking-width limit of the band conditional on the same grid.

    For the wedge this equals the finite-width conditional (width-independent);
    for the tube it is the arclength-uniform density.
    """
    edges = _grid_edges(domain, theta_grid)
    centers = edge_centers(edges)
    half = domain is CircleDomain.HALF_MERIDIAN
    if geometry is BandGeometry.WEDGE:
        if half:
            values = np.cos(centers) / 2.0
            masses = (np.sin(edges[1:]) - np.sin(edges[:-1])) / 2.0
        else:
            values = np.abs(np.cos(centers)) / 4.0
            cum = _abs_cos_cumulative(edges)
            masses = (cum[1:] - cum[:-1]) / 4.0
        return from_cell_masses(edges, values, masses)
    level = 1.0 / math.pi if half else 1.0 / (2.0 * math.pi)
    values = np.full(len(centers), level)
    masses = np.diff(edges) * level
    return from_cell_masses(edges, values, masses)


def band_histogram(points, band: GreatCircleBand, bins: int):
    """Counts of in-band points over equal-width circle-coordinate bins.

    Returns ``(counts, edges, n_inside)``.  Raises :class:`EmptyBandError`
    when no point falls inside the band.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    theta, phi = _as_theta_phi(points)
    inside = band.contains(theta, phi)
    n_inside = int(np.count_nonzero(inside))
    if n_inside == 0:
        raise EmptyBandError(
            f"empty band: no sample inside the {band.geometry.value} band "
            f"of half-width {band.half_width}"
        )
    coord = band.circle_coordinate(theta[inside], phi[inside])
    lo, hi = band.coordinate_interval()
    edges = regular_edges(lo, hi, bins)
    counts, _ = np.histogram(coord, bins=edges)
    return counts, edges, n_inside


def empirical_band_conditional(points, band: GreatCircleBand, bins: int) -> GriddedDensity:
    """Histogram estimate of the band conditional from sphere samples.

    The density value in each bin is ``count / (n_inside * bin_width)``, an
    unbiased estimate of the finite-width band conditional.
    """
    counts, edges, n_inside = band_histogram(points, band, bins)
    widths = np.diff(edges)
    values = counts / (n_inside * widths)
    return GriddedDensity(grid=(edge_centers(edges),), values=values, cell_measure=widths)


def band_limit_study(
    geometry: BandGeometry,
    schedule,
    samples: int,
    seed,
    domain: CircleDomain = CircleDomain.FULL_CIRCLE,
    bins: int = 36,
) -> list[tuple[float, float]]:
    """Sup-norm gap between the empirical band conditional and its limit.

    For each half-width in the strictly decreasing `schedule`, draws a fresh
    batch of `samples` sphere points (child seeds derived per level) and
    records ``max |empirical - limit|`` over the bin centers.

    Returns a list of ``(half_width, deviation)`` rows.
    """
    schedule = [float(h) for h in schedule]
    if not schedule:
        raise ValueError("schedule must contain at least one half-width")
    if any(not 0.0 < h < math.pi / 2 for h in schedule):
        raise ValueError("schedule half-widths must lie in (0, pi/2)")
    if len(schedule) > 1 and not all(b < a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly decreasing")
    limit = limit_conditional(geometry, domain, bins)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(len(schedule))
    rows = []
    for half_width, child in zip(schedule, children):
        band = GreatCircleBand(geometry, half_width, domain)
        pts = sample_uniform_sphere(samples, child)
        emp = empirical_band_conditional(pts, band, bins)
        deviation = float(np.max(np.abs(emp.values - limit.values)))
        rows.append((half_width, deviation))
    return rows
