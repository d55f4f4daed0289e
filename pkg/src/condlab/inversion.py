"""A 3-observation, 2-parameter linear forward model with uniform box noise.

Two ways of writing the likelihood are implemented side by side:

* form 1 — the noise density evaluated at the data residual,
  ``p_n(d_obs - g(m))``;
* form 2 — a prior over noise-free data, namely the noise law re-centered at
  the observations, evaluated at ``g(m)``.

The two are the same function of ``m`` (the box is symmetric), and the code
paths are arranged so they agree bitwise, not merely to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroEvidenceError
from .grids import GriddedDensity


@dataclass(frozen=True)
class LinearForward:
    """Forward map ``m = (m1, m2) -> (a*m2, b*m1, c*m1)``.

    The first observation constrains only ``m2``; the other two constrain only
    ``m1``, so with ``a != 0`` and at least one of ``b, c`` nonzero the model
    is overdetermined in the second parameter block.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.a, self.b, self.c)):
            raise ValueError("coefficients must be finite")
        if self.a == 0.0:
            raise ValueError("a != 0 is required")
        if self.b == 0.0 and self.c == 0.0:
            raise ValueError("at least one of b, c must be nonzero")

    def __call__(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        m1 = m[..., 0]
        m2 = m[..., 1]
        return np.stack([self.a * m2, self.b * m1, self.c * m1], axis=-1)


def forward_apply(forward: LinearForward, m) -> np.ndarray:
    """Apply the linear forward map to one or many parameter vectors."""
    return forward(m)


@dataclass(frozen=True)
class BoxNoise:
    """I.i.d. uniform noise on the closed box ``[-sigma, sigma]^3``."""

    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma > 0 is required")

    @property
    def level(self) -> float:
        """Density value inside the support, ``(2 sigma)^-3``."""
        return (2.0 * self.sigma) ** -3

    def density(self, n) -> np.ndarray | float:
        n = np.asarray(n, dtype=float)
        inside = np.all(np.abs(n) <= self.sigma, axis=-1)
        out = np.where(inside, self.level, 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShiftedDataPrior:
    """The noise law re-centered at the observed data.

    Evaluates ``noise.density(center - x)``: a box of half-width sigma around
    ``center``.
    """

    center: np.ndarray
    noise: BoxNoise

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.shape != (3,) or not np.all(np.isfinite(center)):
            raise ValueError("center must be a finite 3-vector")
        object.__setattr__(self, "center", center)

    def density(self, x) -> np.ndarray | float:
        return self.noise.density(self.center - np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SupportRegion:
    """The parameter region with nonzero likelihood for a box-noise problem."""

    forward: LinearForward
    noise: BoxNoise
    d_obs: np.ndarray

    def __post_init__(self):
        d_obs = np.asarray(self.d_obs, dtype=float)
        if d_obs.shape != (3,) or not np.all(np.isfinite(d_obs)):
            raise ValueError("d_obs must be a finite 3-vector")
        object.__setattr__(self, "d_obs", d_obs)

    def contains(self, m):
        residual = self.d_obs - self.forward(m)
        return np.all(np.abs(residual) <= self.noise.sigma, axis=-1)

    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]] | None:
        """Closed rectangle ``(m1_interval, m2_interval)``, or None if empty.

        Each observation row with a nonzero coefficient contributes an
        interval; rows with a zero coefficient only impose a feasibility check
        on the corresponding observation.
        """
        sigma = self.noise.sigma
        d1, d2, d3 = self.d_obs
        lo2, hi2 = sorted(((d1 - sigma) / self.forward.a, (d1 + sigma) / self.forward.a))
        lo1, hi1 = -np.inf, np.inf
        for coeff, d in ((self.forward.b, d2), (self.forward.c, d3)):
            if coeff == 0.0:
                if abs(d) > sigma:
                    return None
                continue
            lo, hi = sorted(((d - sigma) / coeff, (d + sigma) / coeff))
            lo1, hi1 = max(lo1, lo), min(hi1, hi)
        if lo1 > hi1:
            return None
        return ((float(lo1), float(hi1)), (float(lo2), float(hi2)))


def likelihood_form1(m, d_obs, noise: BoxNoise, forward: LinearForward):
    """Likelihood as the noise density at the residual ``d_obs - g(m)``."""
    d_obs = np.asarray(d_obs, dtype=float)
    return noise.density(d_obs - forward(m))


def likelihood_form2(m, prior_d: ShiftedDataPrior, forward: LinearForward):
    """Likelihood as the shifted data prior evaluated at ``g(m)``."""
    return prior_d.density(forward(m))


@dataclass(frozen=True)
class InverseProblem:
    """A box-noise inverse problem bundled with its parameter prior."""

    forward: LinearForward
    noise: BoxNoise
    d_obs: np.ndarray
    prior: GriddedDensity

    def __post_init__(self):
        d_obs = np.asarray(self.d_obs, dtype=float)
        if d_obs.shape != (3,) or not np.all(np.isfinite(d_obs)):
            raise ValueError("d_obs must be a finite 3-vector")
        object.__setattr__(self, "d_obs", d_obs)

    def support(self) -> SupportRegion:
        return SupportRegion(self.forward, self.noise, self.d_obs)

    def likelihood(self, m):
        return likelihood_form1(m, self.d_obs, self.noise, self.forward)


def posterior_on_grid(prior_m: GriddedDensity, likelihood) -> tuple[GriddedDensity, float]:
    """Grid posterior ``prior * likelihood / evidence`` by midpoint quadrature.

    Parameters
    ----------
    prior_m:
        Normalized prior density on a parameter grid.
    likelihood:
        Vectorized callable taking stacked parameter coordinates (trailing
        dimension = number of parameters) and returning likelihood values.

    Returns
    -------
    (posterior, evidence)
        The renormalized posterior on the same grid and the midpoint-rule
        evidence ``sum(prior * likelihood * cell_measure)``.

    Raises
    ------
    ZeroEvidenceError
        If the likelihood vanishes at every grid node: conditioning on an
        impossible event has no posterior.
    """
    lik = np.asarray(likelihood(prior_m.stacked_centers()), dtype=float)
    if lik.shape != prior_m.values.shape:
        raise ValueError("likelihood output shape does not match the prior grid")
    if np.any(lik < 0) or not np.all(np.isfinite(lik)):
        raise ValueError("likelihood values must be finite and non-negative")
    weighted = prior_m.values * lik * prior_m.cell_measure
    evidence = float(np.sum(weighted))
    if evidence == 0.0:
        raise ZeroEvidenceError("zero evidence: likelihood vanishes on the whole grid")
    posterior = GriddedDensity(
        grid=prior_m.grid,
        values=prior_m.values * lik / evidence,
        cell_measure=prior_m.cell_measure,
    )
    return posterior, evidence
