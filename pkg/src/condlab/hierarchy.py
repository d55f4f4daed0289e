"""Empirical-Bayes hyperparameter fitting in a scalar linear-Gaussian model.

The model is ``y = k * m + n`` with ``m ~ N(0, lambda^2)`` and
``n ~ N(0, sigma^2)``, so the marginal law of the observation is
``N(0, k^2 * lambda^2 + sigma^2)``.  Fitting the prior scale ``lambda`` by
maximizing the marginal likelihood ties the fitted prior to the observation
*and* to the forward constant ``k``: the product ``|k| * lambda_hat`` is what
the data pin down, so the "prior" scale changes whenever the physics does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HierarchicalModel:
    """Scalar forward constant `k`, noise scale `sigma`, prior scale `lam`."""

    k: float
    sigma: float
    lam: float

    def __post_init__(self):
        if not np.isfinite(self.k):
            raise ValueError("k must be finite")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma > 0 is required")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lambda >= 0 is required")

    @property
    def marginal_variance(self) -> float:
        return self.k**2 * self.lam**2 + self.sigma**2


def marginal_loglik(y: float, model: HierarchicalModel) -> float:
    """Log density of the zero-mean Gaussian marginal of `y`."""
    variance = model.marginal_variance
    return -0.5 * (math.log(2.0 * math.pi * variance) + y * y / variance)


def _loglik_over_lambdas(y: float, k: float, sigma: float, lams: np.ndarray) -> np.ndarray:
    variance = k * k * lams * lams + sigma * sigma
    return -0.5 * (np.log(2.0 * np.pi * variance) + y * y / variance)


@dataclass(frozen=True)
class HyperparameterFit:
    lambda_hat: float
    achieved_marginal_loglik: float
    at_boundary: bool


def default_lambda_grid(y: float, k: float, sigma: float, points: int = 10_000) -> np.ndarray:
    """Search grid ``[0, 10 * (|y| + sigma) / |k|]``, generous for any argmax."""
    return np.linspace(0.0, 10.0 * (abs(y) + sigma) / abs(k), points)


def empirical_bayes_fit(y: float, k: float, sigma: float, lam_grid=None) -> HyperparameterFit:
    """Maximize the marginal likelihood of `y` over the prior scale.

    A plain grid argmax over `lam_grid` (one refinement pass around the coarse
    argmax) — deliberately oracle-checkable rather than clever.  The fit is
    flagged `at_boundary` when it lands exactly on lambda = 0, which happens
    whenever the observation is no larger than the noise scale.
    """
    if k == 0.0:
        raise ValueError("k must be nonzero: the prior scale would be unidentifiable")
    if not sigma > 0:
        raise ValueError("sigma > 0 is required")
    grid = default_lambda_grid(y, k, sigma) if lam_grid is None else np.asarray(lam_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0 or not np.all(np.diff(grid) > 0):
        raise ValueError("lam_grid must be an increasing 1-D grid starting at 0")
    coarse = _loglik_over_lambdas(y, k, sigma, grid)
    i = int(np.argmax(coarse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    fine = np.linspace(lo, hi, len(grid))
    fine_ll = _loglik_over_lambdas(y, k, sigma, fine)
    j = int(np.argmax(fine_ll))
    lambda_hat = float(fine[j])
    return HyperparameterFit(
        lambda_hat=lambda_hat,
        achieved_marginal_loglik=float(fine_ll[j]),
        at_boundary=lambda_hat == 0.0,
    )


@dataclass(frozen=True)
class AcausalityRow:
    k: float
    lambda_hat: float
    loglik: float
    at_boundary: bool


def acausality_report(y: float, sigma: float, k_list) -> list[AcausalityRow]:
    """Fit the prior scale for each forward constant at a fixed observation.

    For ``y^2 > sigma^2`` the fitted scale varies with ``k`` (as ``1/|k|``),
    exhibiting that the "hyperparameter" is determined by the data and the
    forward model together, not by prior knowledge alone.
    """
    k_list = [float(k) for k in k_list]
    if any(k == 0.0 for k in k_list):
        raise ValueError("k_list entries must be nonzero")
    if len(set(k_list)) != len(k_list):
        raise ValueError("k_list entries must be distinct")
    rows = []
    for k in k_list:
        fit = empirical_bayes_fit(y, k, sigma)
        rows.append(
            AcausalityRow(
                k=k,
                lambda_hat=fit.lambda_hat,
                loglik=fit.achieved_marginal_loglik,
                at_boundary=fit.at_boundary,
            )
        )
    return rows
