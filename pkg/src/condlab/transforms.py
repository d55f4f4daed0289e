"""Diffeomorphic reparameterizations of the data space.

A :class:`DataTransform` packages a map on 3-vectors, its inverse, and the
absolute determinant of the inverse Jacobian, ``y -> |det d(d)/d(y)|``.
Densities move to the new coordinates by composing with the inverse and
multiplying by that determinant; likelihoods of a transformed problem pick up
the determinant evaluated at the *noise-free* transformed data, which is what
makes them genuinely different functions of the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .inversion import BoxNoise, LinearForward

#: Guard distance from the poles of the tan map, in radians.
TAN_DOMAIN_DELTA = 1e-6

#: Step factor for central finite-difference Jacobian checks.
FD_STEP = 1e-5


@dataclass(frozen=True)
class DataTransform:
    """A diffeomorphism of the data space with closed-form inverse Jacobian.

    Fields
    ------
    map / inverse:
        Vectorized callables on arrays with trailing dimension 3.
    inv_jac_det:
        Vectorized callable returning ``|det d(d)/d(y)|`` at points of the
        transformed space (positive on the domain).
    params:
        Parameters identifying the member within its family, echoed into run
        manifests.
    """

    name: str
    map: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    inv_jac_det: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)


def identity_transform() -> DataTransform:
    def _map(d):
        return np.array(d, dtype=float)

    def _ijd(y):
        y = np.asarray(y, dtype=float)
        return np.ones(y.shape[:-1])

    return DataTransform(name="identity", map=_map, inverse=_map, inv_jac_det=_ijd)


def tan_d1_transform(delta: float = TAN_DOMAIN_DELTA) -> DataTransform:
    """Transform ``(d1, d2, d3) -> (tan d1, d2, d3)`` on ``|d1| < pi/2 - delta``.

    The inverse Jacobian determinant is ``1 / (y1^2 + 1)``.
    """

    limit = np.pi / 2 - delta

    def _map(d):
        d = np.array(d, dtype=float)
        d1 = d[..., 0]
        if np.any(np.abs(d1) > limit):
            raise DomainError(f"tan_d1: |d1| must stay below pi/2 - {delta}")
        d[..., 0] = np.tan(d1)
        return d

    def _inverse(y):
        y = np.array(y, dtype=float)
        y[..., 0] = np.arctan(y[..., 0])
        return y

    def _ijd(y):
        y = np.asarray(y, dtype=float)
        return 1.0 / (y[..., 0] ** 2 + 1.0)

    return DataTransform(
        name="tan_d1", map=_map, inverse=_inverse, inv_jac_det=_ijd, params={"delta": delta}
    )


def power_d1_transform(gamma: float, anchor: float) -> DataTransform:
    """Signed power map on the first component with a fixed point at ``anchor``.

    ``y1 = sign(d1) * anchor * (|d1| / anchor)^gamma``; components 2 and 3 are
    untouched.  ``anchor > 0`` is a scale fixing the observed data point, so
    the whole family maps the observation to itself.  The inverse Jacobian
    determinant is ``(1/gamma) * (|y1| / anchor)^(1/gamma - 1)``.
    """
    if not gamma > 0:
        raise ValueError("gamma > 0 is required")
    if not anchor > 0:
        raise ValueError("anchor > 0 is required")

    def _map(d):
        d = np.array(d, dtype=float)
        d1 = d[..., 0]
        d[..., 0] = np.sign(d1) * anchor * (np.abs(d1) / anchor) ** gamma
        return d

    def _inverse(y):
        y = np.array(y, dtype=float)
        y1 = y[..., 0]
        y[..., 0] = np.sign(y1) * anchor * (np.abs(y1) / anchor) ** (1.0 / gamma)
        return y

    def _ijd(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return (1.0 / gamma) * (np.abs(y[..., 0]) / anchor) ** (1.0 / gamma - 1.0)

    return DataTransform(
        name="power_d1",
        map=_map,
        inverse=_inverse,
        inv_jac_det=_ijd,
        params={"gamma": gamma, "anchor": anchor},
    )


_FACTORIES: dict[str, Callable[..., DataTransform]] = {
    "identity": identity_transform,
    "tan_d1": tan_d1_transform,
    "power_d1": power_d1_transform,
}


def make_transform(name: str, **params) -> DataTransform:
    """Instantiate a registered transform by name (used by config files)."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(_FACTORIES))
        raise ValueError(f"unknown transform {name!r}; known: {known}") from None
    return factory(**params)


@dataclass(frozen=True)
class TransformedForward:
    """Forward model followed by a data-space transform."""

    base: LinearForward
    transform: DataTransform

    def __call__(self, m) -> np.ndarray:
        return self.transform.map(self.base(m))


def pushforward_density(p: Callable, t: DataTransform) -> Callable:
    """Density of ``y = t.map(d)`` when ``d`` has density `p`.

    Returns the callable ``y -> p(t.inverse(y)) * t.inv_jac_det(y)``.  Points
    whose preimage is not finite (outside the image of the declared domain)
    raise :class:`DomainError`.
    """

    def q(y):
        y = np.asarray(y, dtype=float)
        d = t.inverse(y)
        if not np.all(np.isfinite(d)):
            raise DomainError(f"{t.name}: point outside the image of the transform domain")
        return p(d) * t.inv_jac_det(y)

    return q


def transformed_likelihood(m, y_obs, noise: BoxNoise, tf: TransformedForward):
    """Likelihood of the reparameterized problem with ``y`` as the data.

    The noise law in the new coordinates is the pushforward of the original
    noise anchored at the noise-free data, so its density at the residual
    ``y_obs - tf(m)`` equals the original box density at the back-mapped
    residual times ``inv_jac_det`` at the noise-free transformed data
    ``tf(m)``.  Support membership is decided by mapping the observation back
    and testing the original box, which is exact.
    """
    d_obs = tf.transform.inverse(np.asarray(y_obs, dtype=float))
    m = np.asarray(m, dtype=float)
    predicted = tf.base(m)
    residual = d_obs - predicted
    inside = np.all(np.abs(residual) <= noise.sigma, axis=-1)
    scalar = inside.ndim == 0
    flat_inside = np.atleast_1d(inside).reshape(-1)
    flat_predicted = predicted.reshape(-1, 3)
    out = np.zeros(flat_inside.shape, dtype=float)
    if np.any(flat_inside):
        y_clean = tf.transform.map(flat_predicted[flat_inside])
        out[flat_inside] = noise.level * tf.transform.inv_jac_det(y_clean)
    return float(out[0]) if scalar else out.reshape(inside.shape)


def jacobian_fd_check(t: DataTransform, probes) -> float:
    """Worst relative error of `inv_jac_det` against finite differences.

    For each probe point ``y``, the Jacobian of ``t.inverse`` is approximated
    by central differences with per-component step ``FD_STEP * (1 + |y_j|)``
    and its absolute determinant is compared with ``t.inv_jac_det(y)``.
    """
    worst = 0.0
    for y in np.atleast_2d(np.asarray(probes, dtype=float)):
        jac = np.empty((3, 3))
        for j in range(3):
            h = FD_STEP * (1.0 + abs(y[j]))
            hi = y.copy()
            lo = y.copy()
            hi[j] += h
            lo[j] -= h
            jac[:, j] = (t.inverse(hi) - t.inverse(lo)) / (2.0 * h)
        fd = abs(float(np.linalg.det(jac)))
        claimed = float(t.inv_jac_det(y))
        worst = max(worst, abs(fd - claimed) / claimed)
    return worst
