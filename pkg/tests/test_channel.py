import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wffd.channel import (ChannelParams, Constellation, DiscretePmf, GaussianLaw, UniformInterval,
                          constant_fading, fading_from_dict, make_pam, residual_noise,
                          round_half_toward_zero, sample_block, standardize)
from wffd.errors import InvalidInputError


@pytest.mark.parametrize("m", [2, 3, 4, 6, 8])
def test_pam_is_standardized(m):
    pam = make_pam(m)
    assert len(pam) == m
    assert pam.mean() == pytest.approx(0.0, abs=1e-15)
    assert pam.variance() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(np.diff(pam.points), 2 * math.sqrt(3 / (m * m - 1)))


def test_two_pam_points():
    assert np.allclose(make_pam(2).points, [-1.0, 1.0])


def test_constellation_validation():
    with pytest.raises(InvalidInputError):
        Constellation([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(InvalidInputError):
        Constellation([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(InvalidInputError):
        make_pam(1)
    with pytest.raises(InvalidInputError):
        ChannelParams(0.0, 1.0)


def test_constellation_round_trip():
    c = Constellation([-1.0, 0.5, 2.0], [0.2, 0.3, 0.5])
    assert Constellation.from_dict(c.to_dict()) == c
    assert Constellation.from_dict({"pam": 4}) == make_pam(4)


@pytest.mark.parametrize("law", [
    DiscretePmf([0.5, 2.0], [0.25, 0.75]),
    UniformInterval(3.0, 1.5),
    GaussianLaw(1.0, 2.0),
])
def test_fading_round_trip_and_moments(law):
    back = fading_from_dict(law.to_dict())
    assert back.to_dict() == law.to_dict()
    draws = law.sample(np.random.default_rng(1), 400_000)
    assert draws.mean() == pytest.approx(law.mean(), abs=0.01)
    assert draws.var() == pytest.approx(law.variance(), rel=0.01)


def test_uniform_interval_support():
    u = UniformInterval(10.0, math.sqrt(3.0))
    assert (u.lo, u.hi) == pytest.approx((10 - math.sqrt(3), 10 + math.sqrt(3)))
    assert u.variance() == pytest.approx(1.0)


def test_unknown_fading_kind():
    with pytest.raises(InvalidInputError):
        fading_from_dict({"kind": "rayleigh"})
    assert fading_from_dict({"kind": "constant", "value": 2.0}).to_dict()["points"] == [2.0]


def test_standardize_keeps_mean_ratio():
    g = standardize(GaussianLaw(4.0, 4.0))
    assert (g.mu, g.var) == (2.0, 1.0)
    u = standardize(UniformInterval(6.0, 2 * math.sqrt(3.0)))
    assert u.mu == pytest.approx(3.0)
    assert u.variance() == pytest.approx(1.0)
    c = standardize(Constellation([1.0, 3.0], [0.5, 0.5]))
    assert np.allclose(c.points, [-1.0, 1.0])


def test_dirt_power():
    params = ChannelParams(10.0, 2.0)
    assert params.dirt_power(GaussianLaw(3.0, 1.0)) == pytest.approx(4.0 * 10.0)


def test_rounding_ties_toward_zero():
    assert np.array_equal(round_half_toward_zero([0.5, -0.5, 1.5, -1.5, 0.49, 0.51]),
                          [0.0, 0.0, 1.0, -1.0, 0.0, 1.0])


@settings(max_examples=200, deadline=None)
@given(st.floats(-40, 40, allow_nan=False))
def test_residual_noise_bounded(z):
    r = float(residual_noise(z))
    assert abs(r) <= 0.25 + 1e-15
    # the removed part is on the half-integer lattice
    assert (2 * (z - r)) == pytest.approx(round(2 * (z - r)), abs=1e-9)


def test_sample_block_is_reproducible_and_correct():
    params = ChannelParams(4.0, 3.0)
    x = np.array([0.0, 1.0, -2.0, 2.0] * 50)
    y1, a1, s1 = sample_block(params, make_pam(2), UniformInterval(2.0, 1.0), x, seed=9)
    y2, a2, s2 = sample_block(params, make_pam(2), UniformInterval(2.0, 1.0), x, seed=9)
    assert np.array_equal(y1, y2) and np.array_equal(a1, a2) and np.array_equal(s1, s2)
    z = y1 - x - 3.0 * a1 * s1
    assert abs(z.mean()) < 0.3
    y, a, s = sample_block(params, make_pam(2), constant_fading(), x, "residual", seed=2)
    assert np.all(np.abs(y - x - 3.0 * a * s) <= 0.25)
    with pytest.raises(InvalidInputError):
        sample_block(params, make_pam(2), constant_fading(), x, "laplace")
