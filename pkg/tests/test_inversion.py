import numpy as np
import pytest

from condlab.errors import ZeroEvidenceError
from condlab.grids import uniform_density
from condlab.inversion import (
    BoxNoise,
    InverseProblem,
    LinearForward,
    ShiftedDataPrior,
    SupportRegion,
    forward_apply,
    likelihood_form1,
    likelihood_form2,
    posterior_on_grid,
)


def test_forward_apply_examples():
    assert np.array_equal(forward_apply(LinearForward(1, 1, 1), [0.0, 0.0]), [0.0, 0.0, 0.0])
    assert np.array_equal(forward_apply(LinearForward(2, 1, 3), [1.0, 1.0]), [2.0, 1.0, 3.0])
    assert np.array_equal(forward_apply(LinearForward(1, 1, 1), [0.3, 0.5]), [0.5, 0.3, 0.3])


def test_forward_vectorized():
    f = LinearForward(2.0, -1.0, 0.5)
    m = np.array([[0.0, 1.0], [2.0, 3.0]])
    out = f(m)
    assert out.shape == (2, 3)
    assert np.array_equal(out[1], [6.0, -2.0, 1.0])


def test_forward_validation():
    with pytest.raises(ValueError):
        LinearForward(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        LinearForward(1.0, 0.0, 0.0)
    LinearForward(1.0, 0.0, 1.0)  # one of b, c may vanish


def test_box_noise_level_and_support():
    noise = BoxNoise(0.1)
    assert noise.level == (2 * 0.1) ** -3
    assert noise.density([0.0, 0.0, 0.0]) == noise.level
    assert noise.density([0.1, -0.1, 0.1]) == noise.level  # closed box boundary
    assert noise.density([0.100001, 0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        BoxNoise(0.0)
    with pytest.raises(ValueError):
        BoxNoise(-1.0)


def test_box_noise_symmetry():
    noise = BoxNoise(0.3)
    rng = np.random.default_rng(4)
    n = rng.uniform(-0.5, 0.5, (100, 3))
    assert np.array_equal(noise.density(n), noise.density(-n))


def test_likelihood_form1_examples():
    noise = BoxNoise(0.1)
    f = LinearForward(1, 1, 1)
    d_obs = [0.5, 0.3, 0.3]
    val = likelihood_form1([0.3, 0.5], d_obs, noise, f)
    assert val == noise.level
    assert val == pytest.approx(125.0, abs=1e-9)
    assert likelihood_form1([0.3, 0.7], d_obs, noise, f) == 0.0
    # boundary residual |r_i| = sigma stays inside (closed box)
    assert likelihood_form1([0.3, 0.6], d_obs, noise, f) == noise.level


def test_formulations_agree_exactly_on_random_problems():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        m = rng.uniform(-2, 2, 2)
        d = rng.uniform(-2, 2, 3)
        noise = BoxNoise(rng.uniform(0.05, 1.0))
        coeffs = rng.uniform(0.1, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
        f = LinearForward(*coeffs)
        l1 = likelihood_form1(m, d, noise, f)
        l2 = likelihood_form2(m, ShiftedDataPrior(d, noise), f)
        assert l1 == l2


def test_support_characterizes_positive_likelihood():
    noise = BoxNoise(0.1)
    f = LinearForward(1.3, -0.7, 2.0)
    d_obs = np.array([0.5, 0.3, 0.3])
    support = SupportRegion(f, noise, d_obs)
    rng = np.random.default_rng(1)
    m = rng.uniform(-1, 1, (5000, 2))
    lik = likelihood_form1(m, d_obs, noise, f)
    assert np.array_equal(lik > 0, support.contains(m))


def test_support_bounds_rectangle():
    support = SupportRegion(LinearForward(1, 1, 1), BoxNoise(0.1), np.array([0.5, 0.3, 0.3]))
    (lo1, hi1), (lo2, hi2) = support.bounds()
    assert (lo1, hi1) == pytest.approx((0.2, 0.4))
    assert (lo2, hi2) == pytest.approx((0.4, 0.6))


def test_support_bounds_negative_coefficient():
    support = SupportRegion(LinearForward(-2, 1, 1), BoxNoise(0.1), np.array([0.5, 0.3, 0.3]))
    (_, _), (lo2, hi2) = support.bounds()
    assert (lo2, hi2) == pytest.approx((-0.3, -0.2))


def test_support_bounds_empty_cases():
    # rows 2 and 3 demand disjoint m1 intervals
    support = SupportRegion(LinearForward(1, 1, 1), BoxNoise(0.1), np.array([0.5, 0.3, -0.3]))
    assert support.bounds() is None
    # a zero coefficient row is a pure feasibility test on its observation
    support = SupportRegion(LinearForward(1, 0, 1), BoxNoise(0.1), np.array([0.5, 0.3, 0.3]))
    assert support.bounds() is None
    support = SupportRegion(LinearForward(1, 0, 1), BoxNoise(0.1), np.array([0.5, 0.05, 0.3]))
    assert support.bounds() is not None


def test_posterior_identity_case():
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (21, 21))
    posterior, ev = posterior_on_grid(prior, lambda m: np.ones(m.shape[:-1]))
    assert ev == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(posterior.values, prior.values)


def test_posterior_zero_evidence():
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (11, 11))
    with pytest.raises(ZeroEvidenceError, match="zero evidence"):
        posterior_on_grid(prior, lambda m: np.zeros(m.shape[:-1]))


def test_posterior_rejects_bad_likelihood():
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (11, 11))
    with pytest.raises(ValueError, match="shape"):
        posterior_on_grid(prior, lambda m: np.ones(5))
    with pytest.raises(ValueError, match="finite"):
        posterior_on_grid(prior, lambda m: np.full(m.shape[:-1], np.nan))


def test_evidence_matches_closed_form_rectangle():
    noise = BoxNoise(0.1)
    f = LinearForward(1, 1, 1)
    d_obs = np.array([0.5, 0.3, 0.3])
    cells = 401
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (cells, cells))
    _, ev = posterior_on_grid(prior, lambda m: likelihood_form1(m, d_obs, noise, f))
    # P(sigma) is the rectangle [0.2, 0.4] x [0.4, 0.6], fully inside the prior
    closed = noise.level * 0.2 * 0.2
    width = 1.0 / cells
    quantization = noise.level * (width * (0.2 + 0.2) + width**2)
    assert abs(ev - closed) <= quantization


def test_posteriors_from_both_forms_are_bitwise_identical():
    noise = BoxNoise(0.1)
    f = LinearForward(1, 1, 1)
    d_obs = np.array([0.5, 0.3, 0.3])
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (101, 101))
    prior_d = ShiftedDataPrior(d_obs, noise)
    post1, ev1 = posterior_on_grid(prior, lambda m: likelihood_form1(m, d_obs, noise, f))
    post2, ev2 = posterior_on_grid(prior, lambda m: likelihood_form2(m, prior_d, f))
    assert ev1 == ev2
    assert np.array_equal(post1.values, post2.values)


def test_inverse_problem_bundle():
    prior = uniform_density(((0.0, 1.0), (0.0, 1.0)), (11, 11))
    problem = InverseProblem(LinearForward(1, 1, 1), BoxNoise(0.1), np.array([0.5, 0.3, 0.3]), prior)
    assert problem.likelihood([0.3, 0.5]) == problem.noise.level
    assert bool(problem.support().contains([0.3, 0.5]))
    with pytest.raises(ValueError):
        InverseProblem(LinearForward(1, 1, 1), BoxNoise(0.1), np.array([0.5, 0.3]), prior)


def test_shifted_prior_validation():
    with pytest.raises(ValueError):
        ShiftedDataPrior(np.array([1.0, 2.0]), BoxNoise(0.1))
    with pytest.raises(ValueError):
        ShiftedDataPrior(np.array([1.0, 2.0, np.inf]), BoxNoise(0.1))
