import math

import mpmath
import numpy as np
import pytest

from wffd.channel import residual_noise
from wffd.gap import (CLAIMED_TOTAL, appendix_table, entropy_bound_terms, gap_breakdown,
                      integer_restriction_gap, quantized_noise_entropy, quantized_noise_pmf, rho_z)


def mp_phi(x):
    return 0.5 * (1 + mpmath.erf(mpmath.mpf(x) / mpmath.sqrt(2)))


@pytest.mark.parametrize("i", [0, 1, 2, 3, 7, 20])
def test_rho_against_mpmath(i):
    mpmath.mp.dps = 40
    lo, hi = i / 2 - 0.25, i / 2 + 0.25
    ref = float(mp_phi(hi) - mp_phi(lo))
    assert rho_z(i) == pytest.approx(ref, rel=1e-12)


def test_rho_one_value():
    assert rho_z(1) == pytest.approx(0.17466, abs=5e-5)
    with pytest.raises(ValueError):
        rho_z(-1)
    with pytest.raises(ValueError):
        rho_z(1.5)


def test_pmf_sums_to_one_and_is_symmetric():
    v, p = quantized_noise_pmf()
    assert p.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(p, p[::-1])
    assert np.allclose(v, -v[::-1])


def test_quantized_noise_entropy_against_histogram():
    # 1e7 draws of [2Z]/2 = Z - residual
    z = np.random.default_rng(11).standard_normal(10_000_000)
    q = np.rint(2 * (z - residual_noise(z))).astype(np.int64)
    _, counts = np.unique(q, return_counts=True)
    f = counts / counts.sum()
    h_mc = float(-np.sum(f * np.log2(f)))
    assert quantized_noise_entropy() == pytest.approx(h_mc, abs=2e-3)
    assert quantized_noise_entropy() <= 4.0


def test_integer_restriction():
    assert integer_restriction_gap() == pytest.approx(0.79248, abs=1e-5)
    assert integer_restriction_gap() < 0.8


def test_entropy_terms_add_up():
    t = entropy_bound_terms()
    total = t["centre"]["computed"] + t["first_three"]["computed"] + t["tail"]["computed"]
    assert total == pytest.approx(t["total"]["computed"], abs=1e-12)
    assert t["tail"]["reference_covers_tail"]
    # centre term -rho log2 rho at rho(0)
    r0 = rho_z(0)
    assert t["centre"]["computed"] == pytest.approx(-r0 * math.log2(r0))


def test_breakdown_notes():
    ncsi = gap_breakdown("NCSI")
    rcsi = gap_breakdown("RCSI")
    assert ncsi.total_claimed == CLAIMED_TOTAL["NCSI"]
    assert ncsi.peak_restriction == pytest.approx(15 - 4 - 0.5 * math.log2(3))
    assert any("14" in n for n in ncsi.notes)
    # 6 - 6 - 0.79 < 0: the integer cost alone already exceeds the claimed slack
    assert rcsi.peak_restriction == 0.0
    assert any("exceed" in n for n in rcsi.notes)


def test_appendix_table_rows():
    rows = {name: (c, p) for name, c, p in appendix_table()}
    c, p = rows["rho_z(1)"]
    assert abs(c - p) < 5e-4
    assert rows["H([2Z]/2)"][0] <= rows["H([2Z]/2)"][1]
