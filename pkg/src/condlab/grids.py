"""Densities sampled on regular grids.

`GriddedDensity` is the density carrier used throughout the package: cell-center
coordinates along each axis, non-negative density values at the centers, and a
per-cell measure chosen so that ``sum(values * cell_measure)`` is one.

Analytic constructors keep the *pointwise* center values exact and fold any
quadrature correction into the cell measure (see :func:`from_cell_masses`), so
both the pointwise and the integral contracts hold at coarse resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tolerance on |total mass - 1| accepted by the GriddedDensity constructor.
MASS_TOL = 1e-9

#: Largest mass a zero-valued cell may carry before construction fails loudly.
ZERO_CELL_MASS_TOL = 1e-12


@dataclass(frozen=True)
class GriddedDensity:
    """A normalized density tabulated at the centers of a regular grid.

    Parameters
    ----------
    grid:
        Tuple with one 1-D array of strictly increasing cell-center coordinates
        per axis.
    values:
        Non-negative density values, shape ``(len(grid[0]), len(grid[1]), ...)``.
    cell_measure:
        Measure attached to each cell, same shape as ``values`` (scalars and
        broadcastable arrays are expanded).  For histogram densities this is the
        geometric cell size; analytic constructors may use per-cell effective
        sizes instead so that the total mass is exact.
    """

    grid: tuple[np.ndarray, ...]
    values: np.ndarray
    cell_measure: np.ndarray

    def __post_init__(self):
        grid = tuple(np.asarray(g, dtype=float) for g in self.grid)
        values = np.asarray(self.values, dtype=float)
        shape = tuple(len(g) for g in grid)
        measure = np.broadcast_to(np.asarray(self.cell_measure, dtype=float), values.shape).copy()
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cell_measure", measure)

        for axis, g in enumerate(grid):
            if g.ndim != 1 or len(g) < 1:
                raise ValueError(f"grid axis {axis} must be a non-empty 1-D array")
            if len(g) > 1 and not np.all(np.diff(g) > 0):
                raise ValueError(f"grid axis {axis} must be strictly increasing")
        if values.shape != shape:
            raise ValueError(f"values shape {values.shape} does not match grid shape {shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        if np.any(values < 0):
            raise ValueError("density values must be non-negative")
        if not np.all(np.isfinite(measure)) or np.any(measure <= 0):
            raise ValueError("cell measures must be finite and positive")
        total = self.total_mass
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"density mass is {total!r}, not 1 within {MASS_TOL}")

    @property
    def ndim(self) -> int:
        return len(self.grid)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.values * self.cell_measure))

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of all cell centers, ``indexing='ij'``."""
        return tuple(np.meshgrid(*self.grid, indexing="ij"))

    def stacked_centers(self) -> np.ndarray:
        """Cell centers as an array of shape ``values.shape + (ndim,)``."""
        return np.stack(self.mesh(), axis=-1)


def regular_edges(lo: float, hi: float, cells: int) -> np.ndarray:
    """Edges of `cells` equal-width cells spanning [lo, hi]."""
    if cells < 1:
        raise ValueError("cells must be >= 1")
    if not hi > lo:
        raise ValueError("need hi > lo")
    return np.linspace(lo, hi, cells + 1)


def edge_centers(edges: np.ndarray) -> np.ndarray:
    edges = np.asarray(edges, dtype=float)
    return 0.5 * (edges[:-1] + edges[1:])


def from_cell_masses(edges: np.ndarray, values: np.ndarray, masses: np.ndarray) -> GriddedDensity:
    """Build a 1-D density from exact center values and exact cell masses.

    The cell measure is set to ``mass / value`` per cell, which keeps the
    tabulated values pointwise exact while the total mass equals
    ``sum(masses)`` exactly.  Zero-valued cells fall back to their geometric
    width; such a cell carrying more than a vanishing mass is an error, since
    that mass could not be represented.
    """
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=float)
    masses = np.asarray(masses, dtype=float)
    widths = np.diff(edges)
    if values.shape != widths.shape or masses.shape != widths.shape:
        raise ValueError("values and masses must have one entry per cell")
    zero = values == 0.0
    if np.any(masses[zero] > ZERO_CELL_MASS_TOL):
        raise ValueError(
            "a grid cell with zero center value carries non-negligible mass; "
            "choose a grid whose nodes avoid exact zeros of the density"
        )
    measure = np.where(zero, widths, np.divide(masses, values, out=np.zeros_like(masses), where=~zero))
    return GriddedDensity(grid=(edge_centers(edges),), values=values, cell_measure=measure)


def histogram_density(samples: np.ndarray, edges: np.ndarray) -> GriddedDensity:
    """Equal-width histogram of `samples`, normalized as a density."""
    edges = np.asarray(edges, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("cannot build a histogram density from zero samples")
    counts, _ = np.histogram(samples, bins=edges)
    inside = int(counts.sum())
    if inside != samples.size:
        raise ValueError("all samples must fall inside the histogram edges")
    widths = np.diff(edges)
    values = counts / (inside * widths)
    return GriddedDensity(grid=(edge_centers(edges),), values=values, cell_measure=widths)


def uniform_density(bounds: tuple[tuple[float, float], ...], shape: tuple[int, ...]) -> GriddedDensity:
    """Uniform density over an axis-aligned box, tabulated on a regular grid."""
    if len(bounds) != len(shape):
        raise ValueError("bounds and shape must have the same length")
    axes = []
    widths = []
    volume = 1.0
    for (lo, hi), n in zip(bounds, shape):
        edges = regular_edges(lo, hi, n)
        axes.append(edge_centers(edges))
        widths.append((hi - lo) / n)
        volume *= hi - lo
    grid_shape = tuple(shape)
    values = np.full(grid_shape, 1.0 / volume)
    measure = np.full(grid_shape, float(np.prod(widths)))
    return GriddedDensity(grid=tuple(axes), values=values, cell_measure=measure)


def integrate_midpoint(fn, bounds: tuple[tuple[float, float], ...], shape: tuple[int, ...]) -> float:
    """Midpoint-rule integral of a vectorized callable over an axis-aligned box.

    `fn` receives an array of stacked coordinates with trailing dimension
    ``len(bounds)`` and must return the integrand values for the leading shape.
    """
    axes = []
    cell = 1.0
    for (lo, hi), n in zip(bounds, shape):
        edges = regular_edges(lo, hi, n)
        axes.append(edge_centers(edges))
        cell *= (hi - lo) / n
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(fn(pts), dtype=float)
    return float(np.sum(vals) * cell)
