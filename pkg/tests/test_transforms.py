import dataclasses
import math

import numpy as np
import pytest

from condlab.errors import DomainError
from condlab.inversion import BoxNoise, LinearForward, ShiftedDataPrior
from condlab.grids import integrate_midpoint
from condlab.transforms import (
    DataTransform,
    TransformedForward,
    identity_transform,
    jacobian_fd_check,
    make_transform,
    power_d1_transform,
    pushforward_density,
    tan_d1_transform,
    transformed_likelihood,
)


def test_identity_round_trip_and_jacobian():
    t = identity_transform()
    d = np.array([0.3, -1.2, 5.0])
    assert np.array_equal(t.inverse(t.map(d)), d)
    assert float(t.inv_jac_det(d)) == 1.0
    assert jacobian_fd_check(t, [d, np.zeros(3)]) == pytest.approx(0.0, abs=1e-9)


def test_tan_round_trip():
    t = tan_d1_transform()
    rng = np.random.default_rng(0)
    d = np.column_stack(
        [rng.uniform(-1.5, 1.5, 200), rng.uniform(-3, 3, 200), rng.uniform(-3, 3, 200)]
    )
    assert np.max(np.abs(t.inverse(t.map(d)) - d)) <= 1e-10
    y = d.copy()
    assert np.max(np.abs(t.map(t.inverse(y)) - y)) <= 1e-10


def test_tan_domain_guard():
    t = tan_d1_transform()
    with pytest.raises(DomainError):
        t.map(np.array([math.pi / 2, 0.0, 0.0]))
    t.map(np.array([math.pi / 2 - 1e-5, 0.0, 0.0]))  # inside the guard


def test_tan_inverse_jacobian_exact_values():
    t = tan_d1_transform()
    for y1, expected in [(0.0, 1.0), (0.5, 0.8), (-0.5, 0.8), (1.0, 0.5), (-1.0, 0.5), (2.0, 0.2), (-2.0, 0.2)]:
        assert float(t.inv_jac_det(np.array([y1, 0.3, -0.7]))) == expected


def test_tan_jacobian_vs_finite_differences():
    t = tan_d1_transform()
    probes = [np.array([y1, 0.0, 0.0]) for y1 in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0)]
    assert jacobian_fd_check(t, probes) < 1e-6


def test_wrong_jacobian_is_caught():
    t = tan_d1_transform()
    wrong = dataclasses.replace(t, inv_jac_det=lambda y: 1.0 / (np.asarray(y)[..., 0] ** 2 + 2.0))
    assert jacobian_fd_check(wrong, [np.array([1.0, 0.0, 0.0])]) > 0.1


def test_power_family():
    t = power_d1_transform(gamma=2.5, anchor=0.5)
    d = np.array([[0.3, 1.0, -1.0], [-0.8, 0.0, 2.0]])
    assert np.max(np.abs(t.inverse(t.map(d)) - d)) <= 1e-12
    # the anchor is a fixed point of every member
    assert t.map(np.array([0.5, 0.0, 0.0]))[0] == pytest.approx(0.5)
    assert jacobian_fd_check(t, [np.array([0.3, 0.0, 0.0]), np.array([-1.2, 1.0, 1.0])]) < 1e-6
    with pytest.raises(ValueError):
        power_d1_transform(gamma=0.0, anchor=1.0)
    with pytest.raises(ValueError):
        power_d1_transform(gamma=1.0, anchor=0.0)


def test_power_gamma_one_is_identity():
    t = power_d1_transform(gamma=1.0, anchor=0.5)
    d = np.array([0.3, -0.4, 0.9])
    assert np.array_equal(t.map(d), d)
    assert float(t.inv_jac_det(d)) == 1.0


def test_registry():
    assert make_transform("identity").name == "identity"
    t = make_transform("tan_d1", delta=1e-8)
    assert t.params == {"delta": 1e-8}
    t = make_transform("power_d1", gamma=2.0, anchor=1.0)
    assert t.params == {"gamma": 2.0, "anchor": 1.0}
    with pytest.raises(ValueError, match="unknown transform"):
        make_transform("rot13")


def test_transformed_forward_composition():
    tf = TransformedForward(LinearForward(1, 1, 1), tan_d1_transform())
    out = tf(np.array([0.3, 0.5]))
    assert out == pytest.approx([math.tan(0.5), 0.3, 0.3])


def test_pushforward_identity_is_pointwise_noop():
    prior = ShiftedDataPrior(np.array([0.5, 0.3, 0.3]), BoxNoise(0.1))
    q = pushforward_density(prior.density, identity_transform())
    pts = np.array([[0.5, 0.3, 0.3], [0.45, 0.25, 0.35], [2.0, 0.0, 0.0]])
    assert np.array_equal(q(pts), prior.density(pts))


def test_pushforward_tan_jacobian_factor():
    # center the box at pi/4 so that y1 = 1 maps back inside it; the Jacobian
    # multiplier at y1 = 1 is then 1/(1^2 + 1) = 0.5
    prior = ShiftedDataPrior(np.array([math.pi / 4, 0.3, 0.3]), BoxNoise(0.1))
    t = tan_d1_transform()
    q = pushforward_density(prior.density, t)
    y = np.array([1.0, 0.3, 0.3])
    assert float(q(y)) == pytest.approx(prior.noise.level * 0.5, abs=1e-12)


def test_pushforward_mass_is_preserved():
    d_obs = np.array([0.5, 0.3, 0.3])
    noise = BoxNoise(0.1)
    prior = ShiftedDataPrior(d_obs, noise)
    q = pushforward_density(prior.density, tan_d1_transform())
    bounds = (
        (math.tan(0.4), math.tan(0.6)),
        (0.2, 0.4),
        (0.2, 0.4),
    )
    mass = integrate_midpoint(q, bounds, (801, 4, 4))
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_pushforward_domain_error():
    # a transform whose declared domain is d1 >= 0: inverse of negative y1 is NaN
    def _map(d):
        d = np.array(d, dtype=float)
        d[..., 0] = np.sqrt(d[..., 0])
        return d

    def _inverse(y):
        y = np.array(y, dtype=float)
        y[..., 0] = np.where(y[..., 0] >= 0, y[..., 0] ** 2, np.nan)
        return y

    def _ijd(y):
        return 2.0 * np.abs(np.asarray(y)[..., 0])

    t = DataTransform(name="sqrt_d1", map=_map, inverse=_inverse, inv_jac_det=_ijd)
    q = pushforward_density(lambda d: np.ones(np.asarray(d).shape[:-1]), t)
    assert float(q(np.array([2.0, 0.0, 0.0]))) == 4.0  # 2 * |y1|
    with pytest.raises(DomainError):
        q(np.array([-1.0, 0.0, 0.0]))


def test_transformed_likelihood_closed_form_spot_values():
    noise = BoxNoise(0.1)
    forward = LinearForward(1, 1, 1)
    t = tan_d1_transform()
    tf = TransformedForward(forward, t)
    # observation chosen so that a*m2 = pi/4 sits at the center of the support
    d_obs = np.array([math.pi / 4, 0.3, 0.3])
    y_obs = t.map(d_obs)
    val = transformed_likelihood(np.array([0.3, math.pi / 4]), y_obs, noise, tf)
    assert isinstance(val, float)
    assert val == pytest.approx(62.5, abs=1e-9)
    # at a*m2 = 0 the factor is cos^2(0) = 1
    d_obs0 = np.array([0.0, 0.3, 0.3])
    val0 = transformed_likelihood(np.array([0.3, 0.0]), t.map(d_obs0), noise, tf)
    assert val0 == pytest.approx(125.0, abs=1e-9)
    # outside the support the likelihood vanishes identically
    assert transformed_likelihood(np.array([0.3, 0.9]), t.map(d_obs0), noise, tf) == 0.0


def test_transformed_likelihood_equals_jacobian_times_level_on_grid():
    noise = BoxNoise(0.1)
    forward = LinearForward(2.0, 1.0, -1.0)
    t = tan_d1_transform()
    tf = TransformedForward(forward, t)
    d_obs = np.array([0.5, 0.3, -0.3])
    y_obs = t.map(d_obs)
    rng = np.random.default_rng(7)
    m = np.column_stack([rng.uniform(0.2, 0.4, 500), rng.uniform(0.2, 0.3, 500)])
    lik = transformed_likelihood(m, y_obs, noise, tf)
    closed = noise.level * np.cos(forward.a * m[:, 1]) ** 2
    inside = np.all(np.abs(d_obs - forward(m)) <= noise.sigma, axis=-1)
    assert np.max(np.abs(lik[inside] - closed[inside])) <= 1e-9
    assert np.all(lik[~inside] == 0.0)


def test_transformed_likelihood_identity_reduces_to_form1():
    from condlab.inversion import likelihood_form1

    noise = BoxNoise(0.25)
    forward = LinearForward(1.5, -0.5, 1.0)
    tf = TransformedForward(forward, identity_transform())
    d_obs = np.array([0.5, 0.3, 0.3])
    rng = np.random.default_rng(3)
    m = rng.uniform(-1, 1, (40, 7, 2))
    lik_t = transformed_likelihood(m, d_obs, noise, tf)
    lik_1 = likelihood_form1(m, d_obs, noise, forward)
    assert lik_t.shape == (40, 7)
    assert np.array_equal(lik_t, lik_1)


def test_transformed_likelihood_domain_error_near_pole():
    noise = BoxNoise(0.1)
    forward = LinearForward(1, 1, 1)
    t = tan_d1_transform()
    tf = TransformedForward(forward, t)
    limit = math.pi / 2 - 1e-6
    d_obs = np.array([limit - 0.05, 0.3, 0.3])
    y_obs = t.map(d_obs)
    # this m is inside the box support but its prediction leaves the tan domain
    with pytest.raises(DomainError):
        transformed_likelihood(np.array([0.3, limit + 0.04]), y_obs, noise, tf)
