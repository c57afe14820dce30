import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_ncsi, brute_rcsi, grid_ncsi, grid_rcsi
from wffd.channel import (ChannelParams, Constellation, DiscretePmf, GaussianLaw, UniformInterval,
                          constant_fading, make_pam)
from wffd.errors import InvalidInputError, UnsupportedModelError
from wffd.geometry import (Interval, min_region_gap, ncsi_min_gap, ordered_gap_closed_form,
                           pam_region_gap, pam_uniform_regions, rcsi_min_gap, reevaluate)


def test_two_pam_large_gain_satisfied_in_both_modes():
    params = ChannelParams(4.0, 20.0)
    for rep in (ncsi_min_gap(params, make_pam(2), constant_fading()),
                rcsi_min_gap(params, make_pam(2), constant_fading())):
        assert rep.min_gap == pytest.approx(36.0)
        assert rep.satisfied


def test_small_gain_violates():
    rep = rcsi_min_gap(ChannelParams(4.0, 0.2), make_pam(2), constant_fading())
    assert rep.min_gap == pytest.approx(0.4)
    assert not rep.satisfied


def test_tie_at_half_fails():
    # c(s - s~) = 0.5 exactly: the gap equals 1/2 and must not count as separated
    rep = rcsi_min_gap(ChannelParams(1.0, 0.25), make_pam(2), constant_fading())
    assert rep.min_gap == pytest.approx(0.5)
    assert not rep.satisfied


def test_uniform_rcsi_example():
    rep = rcsi_min_gap(ChannelParams(4.0, 1.0), make_pam(2), UniformInterval(10.0, math.sqrt(3.0)))
    assert rep.min_gap == pytest.approx(2 * (10 - math.sqrt(3)) - 4, abs=1e-12)
    assert rep.min_gap == pytest.approx(grid_rcsi(4.0, 1.0, [-1.0, 1.0], 10 - math.sqrt(3), 10 + math.sqrt(3)),
                                        abs=1e-6)


def test_gaussian_fading_never_separates():
    rep = ncsi_min_gap(ChannelParams(4.0, 20.0), make_pam(2), GaussianLaw(5.0))
    assert rep.min_gap == 0.0 and not rep.satisfied and rep.note
    assert not rcsi_min_gap(ChannelParams(4.0, 20.0), make_pam(2), GaussianLaw(5.0)).satisfied


def test_witness_reproduces_gap():
    params = ChannelParams(9.0, 0.7)
    fad = DiscretePmf([0.3, 1.1, 2.0], [0.2, 0.5, 0.3])
    for rep in (ncsi_min_gap(params, make_pam(4), fad), rcsi_min_gap(params, make_pam(4), fad),
                ncsi_min_gap(params, make_pam(4), UniformInterval(1.0, 0.5))):
        assert reevaluate(rep, params.c) == pytest.approx(rep.min_gap, abs=1e-12)
    d = ncsi_min_gap(params, make_pam(4), fad).to_dict()
    assert set(d) >= {"min_gap", "satisfied", "witness", "mode"}


def test_theorem_form_matches_enumeration():
    params = ChannelParams(4.0, 3.0)
    fad = DiscretePmf([0.5, 1.0], [0.5, 0.5])
    a = ncsi_min_gap(params, make_pam(2), fad, form="appendix")
    b = ncsi_min_gap(params, make_pam(2), fad, form="theorem")
    assert b.form == "theorem"
    assert reevaluate(b, 3.0) == pytest.approx(b.min_gap)
    brute = min(abs(i - 3.0 * x * 1.0 - y * -1.0) for i in range(-4, 5) for x in (0.5, 1.0) for y in (0.5, 1.0))
    assert b.min_gap == pytest.approx(brute)
    assert a.min_gap == pytest.approx(brute_ncsi(4.0, 3.0, [-1.0, 1.0], [0.5, 1.0]))
    with pytest.raises(InvalidInputError):
        ncsi_min_gap(params, make_pam(2), fad, form="other")


def test_needs_two_states():
    with pytest.raises(InvalidInputError):
        ncsi_min_gap(ChannelParams(4.0, 1.0), Constellation([1.0], [1.0]), constant_fading())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.lists(st.floats(0.05, 3.0), min_size=1, max_size=5, unique=True),
       st.floats(0.05, 6.0), st.floats(1.0, 30.0), st.booleans())
def test_discrete_checker_matches_enumeration(m, fpts, c, P, equal):
    fpts = sorted(fpts)
    if np.any(np.diff(fpts) <= 1e-9):
        return
    fad = DiscretePmf(fpts, np.full(len(fpts), 1.0 / len(fpts)))
    params, state = ChannelParams(P, c), make_pam(m)
    n = ncsi_min_gap(params, state, fad, include_equal_states=equal)
    assert n.min_gap == pytest.approx(brute_ncsi(P, c, state.points, fpts, equal), abs=1e-12)
    r = rcsi_min_gap(params, state, fad)
    assert r.min_gap == pytest.approx(brute_rcsi(P, c, state.points, fpts), abs=1e-12)


def test_rcsi_not_below_ncsi_on_shared_slice():
    # every RCSI tuple is an NCSI tuple with a = a~ and a sign flip of i
    rng = np.random.default_rng(4)
    for _ in range(20):
        fpts = np.sort(rng.uniform(0.1, 2.0, 3))
        fad = DiscretePmf(fpts, [1 / 3] * 3)
        P = float(rng.uniform(1, 16))
        params = ChannelParams(P, float(rng.uniform(0.1, 3)))
        # RCSI scans |i| <= 2 floor(sqrt P) which is inside the NCSI range
        assert rcsi_min_gap(params, make_pam(3), fad).min_gap >= ncsi_min_gap(params, make_pam(3), fad).min_gap - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_uniform_checker_matches_grid(seed):
    rng = np.random.default_rng(100 + seed)
    lo = float(rng.uniform(0.5, 3.0))
    hi = lo + float(rng.uniform(0.2, 1.0))
    state = make_pam(int(rng.integers(2, 4)))
    c = 0.2 / float(np.max(np.abs(state.points)))
    P = float(rng.uniform(1, 10))
    fad = UniformInterval(0.5 * (lo + hi), 0.5 * (hi - lo))
    got = ncsi_min_gap(ChannelParams(P, c), state, fad).min_gap
    assert got == pytest.approx(grid_ncsi(P, c, state.points, fad.lo, fad.hi), abs=1e-6)
    got = rcsi_min_gap(ChannelParams(P, c), state, fad).min_gap
    assert got == pytest.approx(grid_rcsi(P, c, state.points, fad.lo, fad.hi), abs=1e-6)


# -- regions -----------------------------------------------------------------

def test_single_region_endpoints():
    regions = dict(pam_uniform_regions(ChannelParams(1.0, 1.0), 2, 10.0))
    r = regions[(0, 0)]  # state -1 swaps the endpoints
    assert (r.lo, r.hi) == pytest.approx((-10 - math.sqrt(3), -10 + math.sqrt(3)))
    r = regions[(0, 1)]
    assert (r.lo, r.hi) == pytest.approx((10 - math.sqrt(3), 10 + math.sqrt(3)))


def test_region_gap_overlap_and_sorting():
    assert min_region_gap([Interval(0, 1), Interval(0.5, 2), Interval(3, 4)]) == 0.0
    assert min_region_gap([Interval(3, 4), Interval(0, 1)]) == pytest.approx(2.0)
    # a long interval swallowing a short one still overlaps; the gap after it counts from its end
    assert min_region_gap([Interval(0, 10), Interval(2, 3), Interval(11, 12)]) == 0.0
    assert min_region_gap([Interval(0, 10), Interval(10.5, 11), Interval(11.25, 12)]) == pytest.approx(0.25)
    with pytest.raises(InvalidInputError):
        Interval(2, 1)
    with pytest.raises(UnsupportedModelError):
        pam_uniform_regions(ChannelParams(1.0, 1.0), 3, 10.0)


def test_large_gain_regions_overlap():
    # inputs step by 1 while each region is c*2*sqrt(3) wide
    res = pam_region_gap(ChannelParams(4.0, 20.0), 2, 1.0)
    assert res.gap == 0.0 and not res.ordered


def test_ordered_layout_closed_form():
    params = ChannelParams(4.0, 0.025)
    res = pam_region_gap(params, 2, 10.0)
    assert res.ordered
    assert res.closed_form == pytest.approx(res.gap, abs=1e-9)
    assert res.gap == pytest.approx(ordered_gap_closed_form(params, 2, 10.0), abs=1e-12)
    assert isinstance(res.gap, float)
    assert ordered_gap_closed_form(params, 2, 1.0) is None
