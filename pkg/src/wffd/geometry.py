"""Separation conditions and output-space region geometry.

State decoding is safe when every value ``x + c*a*s`` produced by one state is
more than 1/2 away from every value produced by a different state, across all
integer inputs in the peak range and all fading values. The checkers below
return the exact minimum separation together with the tuple attaining it.
"""

from dataclasses import dataclass, asdict
import math
from itertools import combinations

import numpy as np

from .channel import DiscretePmf, GaussianLaw, UniformInterval, make_pam
from .errors import InvalidInputError, UnsupportedModelError

THRESHOLD = 0.5
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Witness:
    i: int
    s: float
    a: float
    s_tilde: float
    a_tilde: float


@dataclass(frozen=True)
class ConditionReport:
    """Minimum separation and whether it clears 1/2 (ties fail)."""

    min_gap: float
    satisfied: bool
    witness: Witness
    mode: str
    form: str = "appendix"
    note: str = ""

    def to_dict(self):
        d = asdict(self)
        d["witness"] = asdict(self.witness)
        return d


def ncsi_minimand(i, s, a, s_tilde, a_tilde, c, form="appendix"):
    """|i + c(a s - a~ s~)|, or the theorem-display variant |i - c a s - a~ s~|."""
    if form == "appendix":
        return abs(i + c * (a * s - a_tilde * s_tilde))
    if form == "theorem":
        return abs(i - c * a * s - a_tilde * s_tilde)
    raise InvalidInputError(f"unknown form {form!r}")


def rcsi_minimand(i, s, a, s_tilde, c):
    return abs(i - c * a * (s - s_tilde))


def reevaluate(report, c):
    """Minimand value at the report's witness."""
    w = report.witness
    if report.mode == "RCSI":
        return rcsi_minimand(w.i, w.s, w.a, w.s_tilde, c)
    return ncsi_minimand(w.i, w.s, w.a, w.s_tilde, w.a_tilde, c, report.form)


def _state_pairs(state, include_equal):
    pts = state.points
    pairs = [(pts[j], pts[k]) for k, j in combinations(range(pts.size), 2)]  # s > s~
    if include_equal:
        pairs += [(p, p) for p in pts]
    if not pairs:
        raise InvalidInputError("need at least two state points")
    return pairs


def _unbounded_report(mode, state, form):
    s, st = state.points[-1], state.points[0]
    return ConditionReport(0.0, False, Witness(0, float(s), 0.0, float(st), 0.0), mode, form,
                           note="unbounded fading support: separation can never hold")


def _min_abs_affine_box(const, c1, c2, box1, box2):
    """Minimise |const + c1*u + c2*v| over the box; returns (value, u, v)."""
    corners = [(u, v) for u in box1 for v in box2]
    vals = [const + c1 * u + c2 * v for u, v in corners]
    lo_k, hi_k = int(np.argmin(vals)), int(np.argmax(vals))
    f_lo, f_hi = vals[lo_k], vals[hi_k]
    if f_lo <= 0.0 <= f_hi:
        if f_hi == f_lo:
            u, v = corners[lo_k]
        else:
            t = -f_lo / (f_hi - f_lo)
            (u0, v0), (u1, v1) = corners[lo_k], corners[hi_k]
            u, v = u0 + t * (u1 - u0), v0 + t * (v1 - v0)
        return abs(const + c1 * u + c2 * v), u, v
    k = int(np.argmin(np.abs(vals)))
    return abs(vals[k]), corners[k][0], corners[k][1]


def ncsi_min_gap(params, state, fading, form="appendix", include_equal_states=False):
    """Minimum of |i + c(a s - a~ s~)| over i in [-2 ceil(sqrt P), 2 ceil(sqrt P)],
    state pairs s > s~ and fading values a, a~.

    ``form="theorem"`` evaluates the variant |i - c a s - a~ s~| instead.
    ``include_equal_states`` also scans s == s~ with i != 0, which covers
    input-only confusions of the same state.
    """
    if len(state) < 2:
        raise InvalidInputError("need at least two state points")
    if isinstance(fading, GaussianLaw):
        return _unbounded_report("NCSI", state, form)
    c = params.c
    imax = 2 * math.ceil(math.sqrt(params.P))
    i_vals = np.arange(-imax, imax + 1)
    if form not in ("appendix", "theorem"):
        raise InvalidInputError(f"unknown form {form!r}")

    def coef(s, st):
        # coefficients of a and a~ in the affine minimand
        return (c * s, -c * st) if form == "appendix" else (-c * s, -st)

    best = (math.inf, None)
    for s, st in _state_pairs(state, False):
        c1, c2 = coef(s, st)
        best = min(best, _scan_pair(i_vals, s, st, c1, c2, fading), key=lambda b: b[0])
    if include_equal_states:
        nz = i_vals[i_vals != 0]
        for s in state.points:
            c1, c2 = coef(s, s)
            best = min(best, _scan_pair(nz, s, s, c1, c2, fading), key=lambda b: b[0])
    w = best[1]
    gap = ncsi_minimand(w.i, w.s, w.a, w.s_tilde, w.a_tilde, c, form)
    return ConditionReport(gap, gap > THRESHOLD, w, "NCSI", form)


def _scan_pair(i_vals, s, st, c1, c2, fading):
    if isinstance(fading, DiscretePmf):
        a = fading.points
        f = i_vals[:, None, None] + c1 * a[None, :, None] + c2 * a[None, None, :]
        k = np.unravel_index(int(np.argmin(np.abs(f))), f.shape)
        return (float(abs(f[k])),
                Witness(int(i_vals[k[0]]), float(s), float(a[k[1]]), float(st), float(a[k[2]])))
    if isinstance(fading, UniformInterval):
        box = (fading.lo, fading.hi)
        best = (math.inf, None)
        for i in i_vals:
            v, u, w = _min_abs_affine_box(float(i), c1, c2, box, box)
            if v < best[0]:
                best = (v, Witness(int(i), float(s), float(u), float(st), float(w)))
        return best
    raise UnsupportedModelError(f"unsupported fading model {type(fading).__name__}")


def rcsi_min_gap(params, state, fading):
    """Minimum of |i - c a (s - s~)| over i in [-2 floor(sqrt P), 2 floor(sqrt P)], s > s~ and a."""
    if len(state) < 2:
        raise InvalidInputError("need at least two state points")
    if isinstance(fading, GaussianLaw):
        return _unbounded_report("RCSI", state, "rcsi")
    c = params.c
    imax = 2 * math.floor(math.sqrt(params.P))
    i_vals = np.arange(-imax, imax + 1)
    best = (math.inf, None)
    for s, st in _state_pairs(state, False):
        d = c * (s - st)
        if isinstance(fading, DiscretePmf):
            a = fading.points
            f = i_vals[:, None] - d * a[None, :]
            k = np.unravel_index(int(np.argmin(np.abs(f))), f.shape)
            cand = (float(abs(f[k])), int(i_vals[k[0]]), float(a[k[1]]))
        elif isinstance(fading, UniformInterval):
            cand = (math.inf, 0, 0.0)
            for i in i_vals:
                f_lo, f_hi = i - d * fading.lo, i - d * fading.hi
                if f_lo * f_hi <= 0.0:
                    a_star = fading.lo if f_lo == f_hi else fading.lo + f_lo / (f_lo - f_hi) * (fading.hi - fading.lo)
                else:
                    a_star = fading.lo if abs(f_lo) <= abs(f_hi) else fading.hi
                v = abs(i - d * a_star)
                if v < cand[0]:
                    cand = (v, int(i), float(a_star))
        else:
            raise UnsupportedModelError(f"unsupported fading model {type(fading).__name__}")
        if cand[0] < best[0]:
            best = (cand[0], Witness(cand[1], float(s), cand[2], float(st), cand[2]))
    w = best[1]
    gap = rcsi_minimand(w.i, w.s, w.a, w.s_tilde, c)
    return ConditionReport(gap, gap > THRESHOLD, w, "RCSI", "rcsi")


# -- region geometry for PAM states under uniform fading ---------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidInputError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @property
    def width(self):
        return self.hi - self.lo


def pam_uniform_regions(params, m, mu_A):
    """Images ``i + c*a*s_j`` of uniform fading a in [mu_A - sqrt3, mu_A + sqrt3].

    One labelled interval per integer input ``i`` in [-floor(sqrt P), floor(sqrt P)]
    and state index ``j`` of the standard m-PAM.
    """
    if int(m) != m or m % 2:
        raise UnsupportedModelError("region construction is defined for even m only")
    pts = make_pam(int(m)).points
    c = params.c
    a_lo, a_hi = mu_A - SQRT3, mu_A + SQRT3
    imax = math.floor(math.sqrt(params.P))
    out = []
    for i in range(-imax, imax + 1):
        for j, s in enumerate(pts):
            e1, e2 = i + c * s * a_lo, i + c * s * a_hi
            out.append(((i, j), Interval(min(e1, e2), max(e1, e2))))
    return out


def _intervals(regions):
    return [r[1] if isinstance(r, tuple) else r for r in regions]


def min_region_gap(regions):
    """Smallest gap between consecutive regions after sorting by left end; 0 if any overlap."""
    ivs = _intervals(regions)
    if len(ivs) < 2:
        raise InvalidInputError("need at least two regions")
    ivs = sorted(ivs, key=lambda r: (r.lo, r.hi))
    gap, reach = math.inf, ivs[0].hi
    for r in ivs[1:]:
        gap = min(gap, max(0.0, r.lo - reach))
        reach = max(reach, r.hi)
    return gap


@dataclass(frozen=True)
class RegionGap:
    gap: float
    ordered: bool
    closed_form: float | None


def ordered_gap_closed_form(params, m, mu_A):
    """Gap of the ordered layout (states increasing within each input, inputs increasing).

    Requires positive fading support, mu_A > sqrt(3). Adjacent states
    ``t < t'`` (t = c*s) are separated by ``lo(t') - hi(t)`` and the wrap from
    the top state of input i to the bottom state of input i + 1 is
    ``1 + lo(t_min) - hi(t_max)``.
    """
    if mu_A <= SQRT3:
        return None
    a_lo, a_hi = mu_A - SQRT3, mu_A + SQRT3
    t = np.sort(params.c * make_pam(int(m)).points)
    lo = np.where(t >= 0, t * a_lo, t * a_hi)
    hi = np.where(t >= 0, t * a_hi, t * a_lo)
    adjacent = lo[1:] - hi[:-1]
    wrap = 1.0 + lo[0] - hi[-1]
    return float(min(adjacent.min(), wrap))


def pam_region_gap(params, m, mu_A):
    """Sweep gap of the PAM regions, cross-checked against the ordered-case formula.

    The closed form is evaluated only when the sorted regions appear in the
    ordered layout; then the two routes must agree within 1e-9.
    """
    regions = pam_uniform_regions(params, m, mu_A)
    gap = min_region_gap(regions)
    ranked = sorted(regions, key=lambda r: (r[1].lo, r[1].hi))
    sign = 1 if params.c >= 0 else -1
    expected = sorted(regions, key=lambda r: (r[0][0], sign * r[0][1]))
    ordered = ([lab for lab, _ in ranked] == [lab for lab, _ in expected]
               and all(b[1].lo > a[1].hi for a, b in zip(ranked, ranked[1:])))
    closed = ordered_gap_closed_form(params, m, mu_A) if ordered else None
    if closed is not None and abs(closed - gap) > 1e-9:
        raise RuntimeError(f"closed form {closed} disagrees with sweep {gap}")
    return RegionGap(float(gap), ordered, closed)
