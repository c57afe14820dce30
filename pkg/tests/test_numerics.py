import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wffd.errors import ConvergenceError, InvalidInputError
from wffd.numerics import (
    UNIT_GAUSSIAN_ENTROPY,
    GaussianMixture,
    IntegrationConfig,
    adaptive_simpson,
    density_entropy,
    discrete_entropy,
    gauss_hermite,
    gauss_legendre,
    gaussian_entropy,
    log_box_gauss_pdf,
    mixture_entropy,
    mixture_label_entropy,
    std_normal_cdf,
)


def brute_entropy(means, weights, sigma, n=400_001):
    # plain trapezoid on a very fine grid, independent of the adaptive rule
    means = np.asarray(means, float)
    y = np.linspace(means.min() - 12 * sigma, means.max() + 12 * sigma, n)
    p = np.zeros_like(y)
    for m, w in zip(means, weights):
        p += w * np.exp(-0.5 * ((y - m) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    f = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return np.trapezoid(f, y)


def test_single_gaussian_entropy():
    mix = GaussianMixture([0.0], [1.0], 1.0)
    assert mixture_entropy(mix) == pytest.approx(UNIT_GAUSSIAN_ENTROPY, abs=1e-9)
    assert UNIT_GAUSSIAN_ENTROPY == pytest.approx(2.047095585180641, abs=1e-12)


def test_far_separated_pair_adds_one_bit():
    mix = GaussianMixture([-50.0, 50.0], [0.5, 0.5], 1.0)
    assert mixture_entropy(mix) == pytest.approx(UNIT_GAUSSIAN_ENTROPY + 1.0, abs=1e-9)


@pytest.mark.parametrize("means,weights,sigma", [
    ([-1.0, 0.3, 2.0], [0.2, 0.5, 0.3], 0.7),
    ([0.0, 0.5], [0.5, 0.5], 1.0),
    ([-3.0, -1.0, 1.0, 3.0], [0.25] * 4, 2.0),
])
def test_mixture_entropy_matches_brute_grid(means, weights, sigma):
    got = mixture_entropy(GaussianMixture(means, weights, sigma))
    assert got == pytest.approx(brute_entropy(means, weights, sigma), abs=1e-8)


def test_label_entropy_matches_mutual_information_identity():
    # H(J|W) = H(J) - I(J;W) and I(J;W) = h(W) - h(noise)
    mix = GaussianMixture([-1.0, 0.0, 2.5], [0.3, 0.3, 0.4], 1.0)
    mi = mixture_entropy(mix) - gaussian_entropy(1.0)
    assert mixture_label_entropy(mix) == pytest.approx(discrete_entropy(mix.weights) - mi, abs=1e-8)


def test_full_output_reports_error_below_tolerance():
    cfg = IntegrationConfig(abs_tol=1e-10)
    val, err = mixture_entropy(GaussianMixture([0.0, 3.0], [0.5, 0.5], 1.0), cfg, full_output=True)
    assert 0 <= err <= 1e-10
    assert math.isfinite(val)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4), st.floats(0.3, 3.0))
def test_mixture_entropy_bounds(means, sigma):
    w = np.full(len(means), 1.0 / len(means))
    mix = GaussianMixture(means, w, sigma)
    h = mixture_entropy(mix)
    # between the component entropy and component entropy plus H(J)
    assert gaussian_entropy(sigma ** 2) - 1e-8 <= h <= gaussian_entropy(sigma ** 2) + discrete_entropy(w) + 1e-8


def test_mixture_validation():
    with pytest.raises(InvalidInputError):
        GaussianMixture([0.0, 1.0], [0.6, 0.6], 1.0)
    with pytest.raises(InvalidInputError):
        GaussianMixture([0.0], [1.0], 0.0)
    with pytest.raises(InvalidInputError):
        GaussianMixture([np.nan], [1.0], 1.0)
    mix = GaussianMixture([0.0], [1.0], 1.0)
    with pytest.raises(ValueError):
        mix.means[0] = 3.0


def test_config_validation():
    with pytest.raises(InvalidInputError):
        IntegrationConfig(abs_tol=0.0)
    with pytest.raises(InvalidInputError):
        IntegrationConfig(support_clip=5.0)


def test_adaptive_simpson_polynomial_and_failure():
    res = adaptive_simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0, 1e-12)
    assert res.value == pytest.approx(0.0, abs=1e-12)
    res = adaptive_simpson(np.cos, 0.0, math.pi / 2, 1e-12)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ConvergenceError) as info:
        adaptive_simpson(lambda x: np.sign(x - 0.3141) * 1e6, 0.0, 1.0, 1e-15, max_subdivisions=20)
    assert math.isfinite(info.value.best_estimate)


def test_density_entropy_of_smoothed_box():
    # Uniform[0, 4] + N(0, 1e-4): about 2 bits plus a small edge term
    h = density_entropy(lambda y: log_box_gauss_pdf(y, 0.0, 4.0, 1e-2), -0.2, 4.2, scale=1e-2)
    y = np.linspace(-0.2, 4.2, 2_000_001)
    p = (std_normal_cdf(y / 1e-2) - std_normal_cdf((y - 4.0) / 1e-2)) / 4.0
    f = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    assert h == pytest.approx(np.trapezoid(f, y), abs=1e-7)
    assert 2.0 < h < 2.01


def test_log_box_gauss_pdf_against_direct_formula():
    y = np.linspace(-8, 12, 41)
    direct = (std_normal_cdf(y - 0.0) - std_normal_cdf(y - 3.0)) / 3.0
    # direct differences lose precision far out; compare where they are accurate
    ok = direct > 1e-12
    assert np.allclose(np.exp(log_box_gauss_pdf(y, 0.0, 3.0, 1.0))[ok], direct[ok], rtol=1e-9)
    far = log_box_gauss_pdf(np.array([60.0]), 0.0, 3.0, 1.0)
    assert np.isfinite(far).all()


def test_std_normal_cdf_against_mpmath():
    for x in (-3.0, -0.25, 0.0, 0.25, 1.7):
        ref = float(0.5 * (1 + mpmath.erf(mpmath.mpf(x) / mpmath.sqrt(2))))
        assert std_normal_cdf(x) == pytest.approx(ref, abs=1e-15)
    assert std_normal_cdf(0.25) == pytest.approx(0.598706, abs=1e-6)
    with pytest.raises(InvalidInputError):
        std_normal_cdf(np.inf)


def test_quadrature_rules_integrate_moments():
    t, w = gauss_hermite(20)
    assert w.sum() == pytest.approx(1.0)
    assert w @ t ** 2 == pytest.approx(1.0)
    assert w @ t ** 4 == pytest.approx(3.0)
    t, w = gauss_legendre(10, 2.0, 6.0)
    assert w.sum() == pytest.approx(1.0)
    assert w @ t == pytest.approx(4.0)


def test_discrete_entropy():
    assert discrete_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert discrete_entropy([1.0, 0.0]) == 0.0
    with pytest.raises(InvalidInputError):
        discrete_entropy([0.5, 0.6])
    with pytest.raises(InvalidInputError):
        gaussian_entropy(0.0)
