"""Achievable rates and outer-bound templates for the fast-fading channel with transmitter-known interference.

Every rate is evaluated for a fixed input family (Gaussian input independent of
the state, Costa precoding, or the linear state-cancelling scheme), not
maximised over all input laws. Rates are in bits per channel use.

Two estimators exist for most quantities:

* ``method="quadrature"`` (default): exact enumeration of the discrete laws and
  adaptive quadrature of the output entropies. Continuous fading enters
  through closed-form output densities (NCSI) or Gauss quadrature over the
  fading value (RCSI).
* ``method="monte_carlo"``: sample averages of log-density ratios with
  batch-means standard errors.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy.special import logsumexp

from . import geometry
from .channel import Constellation, DiscretePmf, GaussianLaw, UniformInterval
from .errors import InvalidInputError, UnsupportedModelError
from .numerics import (
    DEFAULT_CONFIG,
    LN2,
    UNIT_GAUSSIAN_ENTROPY,
    GaussianMixture,
    density_entropy,
    discrete_entropy,
    gauss_hermite,
    gauss_legendre,
    gaussian_entropy,
    log_box_gauss_pdf,
    mixture_entropy,
    mixture_label_entropy,
)

DEFAULT_MC_BUDGET = 200_000
MIN_MC_BUDGET = 10_000
DEFAULT_FADING_NODES = 96
MAX_FADING_NODES = 256
N_BATCHES = 50

OUTER_BOUND_CONSTANT = {"NCSI": 4.0, "RCSI": 6.0}
BOUND_CAVEAT = "bound template evaluated at X ~ N(0, P) independent of S, not maximised over P_X|S"


class CsiMode(str, Enum):
    NCSI = "NCSI"
    RCSI = "RCSI"


@dataclass(frozen=True)
class RateResult:
    """A rate with its numeric-error diagnostics.

    ``numeric_error`` combines the quadrature error estimate and, for Monte
    Carlo estimates, the standard error.
    """

    rate: float
    method: str
    numeric_error: float = 0.0
    samples_used: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "numeric_error", float(self.numeric_error))
        if not math.isfinite(self.rate):
            raise InvalidInputError(f"rate is not finite: {self.rate}")
        if not self.numeric_error >= 0:
            raise InvalidInputError("numeric_error must be nonnegative")

    def to_dict(self):
        return {"rate": self.rate, "method": self.method, "numeric_error": self.numeric_error,
                "samples_used": self.samples_used, "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Enum):
        return obj.value
    return obj


# -- input strategies ---------------------------------------------------------

@dataclass(frozen=True)
class GaussianInput:
    """X ~ N(0, P) independent of the state."""


@dataclass(frozen=True)
class CostaPrecoding:
    """Costa auxiliary built on the mismatched state estimate ``k * c * S``."""

    k: float


def _default_k_map(points):
    return -np.asarray(points, dtype=float)


@dataclass(frozen=True)
class LinearCancel:
    """Linear scheme X = sqrt(P) * (alpha * G - sqrt(1 - alpha^2) * K(S)).

    ``alpha=None`` sweeps ``alphas`` and keeps the best value. ``k_map`` maps
    the array of state points to the K values; it defaults to ``K(S) = -S``.
    """

    alpha: float | None = None
    alphas: tuple = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))
    k_map: object = None

    def grid(self):
        grid = (self.alpha,) if self.alpha is not None else tuple(self.alphas)
        if len(grid) == 0:
            raise InvalidInputError("empty alpha grid")
        if any(not 0.0 <= a <= 1.0 for a in grid):
            raise InvalidInputError("alpha must lie in [0, 1]")
        return grid

    def k_values(self, state):
        fn = self.k_map if self.k_map is not None else _default_k_map
        k = np.asarray(fn(state.points), dtype=float)
        if k.shape != state.points.shape:
            raise InvalidInputError("k_map must return one value per state point")
        mean = float(state.probs @ k)
        var = float(state.probs @ k ** 2) - mean ** 2
        if abs(mean) > 1e-9 or abs(var - 1.0) > 1e-9:
            raise InvalidInputError("k_map output must have zero mean and unit variance under the state law")
        return k


@dataclass(frozen=True)
class DiscreteInput:
    """Equiprobable-or-not finite input law, independent of the state."""

    constellation: Constellation


# -- closed forms -------------------------------------------------------------

def awgn_capacity(P):
    """1/2 log2(1 + P)."""
    if not P >= 0:
        raise InvalidInputError("P must be nonnegative")
    return 0.5 * math.log2(1.0 + P)


def gaussian_mismatch_loss(P, a, k):
    """Rate loss of Costa precoding built for gain ``k*a`` when the true gain is ``a``."""
    if not all(math.isfinite(v) for v in (P, a, k)):
        raise InvalidInputError("inputs must be finite")
    if not P > 0:
        raise InvalidInputError("P must be positive")
    return 0.5 * math.log2(1.0 + P * a * a * (k - 1.0) ** 2 / (P + a * a + 1.0))


# -- output laws --------------------------------------------------------------

class _OutputLaw:
    """Finite mixture of Gaussians convolved with (possibly degenerate) uniform boxes.

    Component ``j`` is ``Uniform[lo_j, hi_j] + N(0, var_j)`` with weight ``w_j``;
    ``lo_j == hi_j`` means a plain Gaussian.
    """

    _POINT_WIDTH = 1e-9

    def __init__(self, w, lo, hi, var):
        w = np.asarray(w, dtype=float)
        keep = w > 0
        self.w = w[keep]
        self.lo = np.asarray(lo, dtype=float)[keep]
        self.hi = np.asarray(hi, dtype=float)[keep]
        self.var = np.broadcast_to(np.asarray(var, dtype=float), w.shape)[keep]
        sd = np.sqrt(self.var)
        self.sd = sd
        self.is_box = (self.hi - self.lo) > self._POINT_WIDTH * sd
        self.hi = np.where(self.is_box, self.hi, self.lo)

    def as_gaussian_mixture(self):
        """Equal-variance point mixture, or None when the law is not of that form."""
        if self.is_box.any() or np.ptp(self.var) > 0:
            return None
        means, idx = np.unique(self.lo, return_inverse=True)
        weights = np.bincount(idx, weights=self.w)
        return GaussianMixture(means, weights / weights.sum(), float(self.sd[0]))

    def logpdf(self, y):
        y = np.asarray(y, dtype=float)[..., None]
        sd, lo, hi = self.sd, self.lo, self.hi
        u = (y - lo) / sd
        out = np.log(self.w) - 0.5 * u * u - np.log(sd * math.sqrt(2.0 * math.pi))
        if self.is_box.any():
            b = self.is_box
            out[..., b] = np.log(self.w[b]) + log_box_gauss_pdf(y, lo[b], hi[b], sd[b])
        return logsumexp(out, axis=-1)

    def support(self, clip):
        return (float(np.min(self.lo - clip * self.sd)), float(np.max(self.hi + clip * self.sd)))

    def entropy(self, cfg):
        mix = self.as_gaussian_mixture()
        if mix is not None:
            return mixture_entropy(mix, cfg, full_output=True)
        lo, hi = self.support(cfg.support_clip)
        return density_entropy(self.logpdf, lo, hi, cfg, float(self.sd.min()), full_output=True)


def _scaled_state_law(gain, state, fading, var, offsets=None):
    """Law of ``offset + gain*A*S + N(0, var)`` averaged over S, A (and offsets).

    ``offsets`` is an optional ``(points, probs)`` pair of a discrete additive
    term independent of (A, S).
    """
    if offsets is None:
        offsets = (np.zeros(1), np.ones(1))
    ox, op = (np.asarray(v, dtype=float) for v in offsets)
    s, ps = state.points, state.probs
    if isinstance(fading, DiscretePmf):
        t = gain * fading.points[None, :] * s[:, None]
        tw = ps[:, None] * fading.probs[None, :]
        lo = hi = t.ravel()
        w = tw.ravel()
        v = np.full(w.size, var)
    elif isinstance(fading, UniformInterval):
        e1, e2 = gain * s * fading.lo, gain * s * fading.hi
        lo, hi, w = np.minimum(e1, e2), np.maximum(e1, e2), ps
        v = np.full(w.size, var)
    elif isinstance(fading, GaussianLaw):
        lo = hi = gain * fading.mu * s
        w = ps
        v = var + (gain * s) ** 2 * fading.var
    else:
        raise UnsupportedModelError(f"unsupported fading model {type(fading).__name__}")
    full_lo = (ox[:, None] + np.asarray(lo)[None, :]).ravel()
    full_hi = (ox[:, None] + np.asarray(hi)[None, :]).ravel()
    full_w = (op[:, None] * np.asarray(w)[None, :]).ravel()
    full_v = np.broadcast_to(np.asarray(v)[None, :], (ox.size, np.size(w))).ravel()
    return _OutputLaw(full_w, full_lo, full_hi, full_v)


def _mixture(means, probs, sigma):
    means = np.asarray(means, dtype=float)
    uniq, idx = np.unique(means, return_inverse=True)
    w = np.bincount(idx, weights=np.asarray(probs, dtype=float))
    return GaussianMixture(uniq, w / w.sum(), sigma)


def _expect_over_fading(fading, g, n_nodes=DEFAULT_FADING_NODES):
    """E[g(A)] with an error estimate; ``g`` returns ``(value, error)``.

    Discrete laws are enumerated exactly. Continuous laws use Gauss nodes and
    the change between ``n_nodes`` and ``n_nodes // 2`` nodes as the error.
    """
    if isinstance(fading, DiscretePmf):
        vals = [g(a) for a in fading.points]
        v = sum(p * x for p, (x, _) in zip(fading.probs, vals))
        e = sum(p * err for p, (_, err) in zip(fading.probs, vals))
        return float(v), float(e)

    def rule(n):
        if isinstance(fading, UniformInterval):
            return gauss_legendre(n, fading.lo, fading.hi)
        if isinstance(fading, GaussianLaw):
            t, w = gauss_hermite(n)
            return fading.mu + math.sqrt(fading.var) * t, w
        raise UnsupportedModelError(f"unsupported fading model {type(fading).__name__}")

    if not 2 <= n_nodes <= MAX_FADING_NODES:
        raise InvalidInputError(f"n_nodes must lie in [2, {MAX_FADING_NODES}]")
    cache = {}

    def q(n):
        nodes, weights = rule(n)
        tot, err = 0.0, 0.0
        for a, w in zip(nodes, weights):
            key = round(float(a), 14)
            if key not in cache:
                cache[key] = g(float(a))
            x, e = cache[key]
            tot += w * x
            err += w * e
        return tot, err

    full, err = q(n_nodes)
    half, _ = q(max(n_nodes // 2, 2))
    return float(full), float(err + abs(full - half))


def _batch_mean(d):
    d = np.asarray(d, dtype=float)
    batches = np.array([b.mean() for b in np.array_split(d, N_BATCHES)])
    return float(d.mean()), float(batches.std(ddof=1) / math.sqrt(N_BATCHES))


def _check_budget(mc_budget):
    if int(mc_budget) < MIN_MC_BUDGET:
        raise InvalidInputError(f"mc_budget must be at least {MIN_MC_BUDGET}")
    return int(mc_budget)


def _mode(mode):
    try:
        return CsiMode(mode)
    except ValueError:
        raise InvalidInputError(f"unknown CSI mode {mode!r}") from None


# -- Costa precoding under gain mismatch --------------------------------------

def _is_gaussian_tag(state):
    return isinstance(state, str) and state.lower() in ("gaussian", "n", "normal")


def costa_mismatch_rate(params, k, state="gaussian", mc_budget=DEFAULT_MC_BUDGET, seed=0,
                        cfg=DEFAULT_CONFIG, method="quadrature"):
    """GP rate I(U;Y) - I(U;S) of Costa precoding built on the estimate ``k*c*S``.

    Unfaded channel ``Y = X + c*S + Z`` with ``U = X + alpha*k*c*S``,
    ``alpha = P/(P+1)`` and ``X ~ N(0, P)`` independent of S. ``state`` is a
    Constellation or the tag ``"gaussian"`` for S ~ N(0, 1).

    The quadrature route uses the exact reduction
    ``I(U;Y) - I(U;S) = h(Y) - h(sqrt(q) S + N)``, where N ~ N(0, 1) and
    ``q = beta^2/P + (c - beta)^2`` is the SNR of the sufficient statistic for
    S given (U, Y). The Monte Carlo route averages the log-density ratios
    directly. The returned rate is clamped at 0; ``details["raw_rate"]`` keeps
    the unclamped value.
    """
    mc_budget = _check_budget(mc_budget)
    P, c = params.P, params.c
    alpha = P / (P + 1.0)
    beta = alpha * k * c
    q = beta * beta / P + (c - beta) ** 2
    gaussian = _is_gaussian_tag(state)
    if not gaussian and not isinstance(state, Constellation):
        raise InvalidInputError("state must be a Constellation or 'gaussian'")

    if method == "quadrature":
        if gaussian:
            raw = gaussian_entropy(P + c * c + 1.0) - gaussian_entropy(q + 1.0)
            err, n = 0.0, 0
        else:
            hy, e1 = mixture_entropy(_mixture(c * state.points, state.probs, math.sqrt(P + 1.0)),
                                     cfg, full_output=True)
            hw, e2 = mixture_entropy(_mixture(math.sqrt(q) * state.points, state.probs, 1.0),
                                     cfg, full_output=True)
            raw, err, n = hy - hw, e1 + e2, 0
    elif method == "monte_carlo":
        raw, err = _costa_mc(P, c, beta, None if gaussian else state, mc_budget, seed)
        n = mc_budget
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return RateResult(max(raw, 0.0), f"costa_mismatch/{method}", err, n,
                      {"raw_rate": raw, "k": k, "alpha": alpha, "q": q,
                       "state": "gaussian" if gaussian else f"{len(state)}-point"})


def _costa_mc(P, c, beta, state, n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, math.sqrt(P), n)
    z = rng.standard_normal(n)
    if state is None:
        s = rng.standard_normal(n)
        u, y = x + beta * s, x + c * s + z
        vu, vy, cuy = P + beta ** 2, P + c * c + 1.0, P + beta * c
        lp_u = _norm_logpdf(u, 0.0, vu)
        lp_u_s = _norm_logpdf(u, beta * s, P)
        lp_y = _norm_logpdf(y, 0.0, vy)
        lp_y_u = _norm_logpdf(y, cuy / vu * u, vy - cuy ** 2 / vu)
    else:
        s = rng.choice(state.points, size=n, p=state.probs)
        u, y = x + beta * s, x + c * s + z
        pts, logp = state.points, np.log(state.probs)
        lp_u_s = _norm_logpdf(u, beta * s, P)
        joint_u = logp + _norm_logpdf(u[:, None], beta * pts, P)
        lp_u = logsumexp(joint_u, axis=1)
        post = joint_u - lp_u[:, None]
        # Y | U=u, S=s ~ N(u + (c - beta) s, 1)
        lp_y_u = logsumexp(post + _norm_logpdf(y[:, None], u[:, None] + (c - beta) * pts, 1.0), axis=1)
        lp_y = logsumexp(logp + _norm_logpdf(y[:, None], c * pts, P + 1.0), axis=1)
    d = (lp_y_u - lp_y - lp_u_s + lp_u) / LN2
    return _batch_mean(d)


def _norm_logpdf(x, mean, var):
    return -0.5 * (x - mean) ** 2 / var - 0.5 * np.log(2.0 * np.pi * var)


# -- state amplification --------------------------------------------------------

def _input_offsets(params, input_law):
    """Return ``(offsets, gaussian_var)`` for the input law plus unit noise."""
    if input_law is None or isinstance(input_law, GaussianInput):
        return None, params.P + 1.0
    if isinstance(input_law, DiscreteInput):
        x = input_law.constellation
        return (x.points, x.probs), 1.0
    raise InvalidInputError(f"unsupported input law {input_law!r}")


def state_amplification_rate(params, state, fading, mode=CsiMode.NCSI, cfg=DEFAULT_CONFIG,
                             input_law=None, method="quadrature", mc_budget=DEFAULT_MC_BUDGET,
                             seed=0, n_nodes=DEFAULT_FADING_NODES):
    """State-amplification inner bound I(Y;X,S) - H(S), or I(Y;X,S|A) - H(S) with RCSI.

    The input is Gaussian ``N(0, P)`` independent of S unless ``input_law`` is
    a DiscreteInput. The rate may be negative and is returned unclamped;
    ``details["negative"]`` flags that case.
    """
    mode = _mode(mode)
    if not isinstance(state, Constellation):
        raise InvalidInputError("state must be a discrete Constellation")
    offsets, gvar = _input_offsets(params, input_law)
    c = params.c
    h_s = discrete_entropy(state.probs)

    if method == "monte_carlo":
        if offsets is not None:
            raise InvalidInputError("the Monte Carlo route supports Gaussian input only")
        mc_budget = _check_budget(mc_budget)
        mi, se = _sa_mc(params, state, fading, mode, mc_budget, seed)
        rate, err, n = mi - h_s, se, mc_budget
    elif method == "quadrature":
        n = 0
        if mode is CsiMode.NCSI:
            h_y, e1 = _scaled_state_law(c, state, fading, gvar, offsets).entropy(cfg)
            h_cond, e2 = 0.0, 0.0
            for s, p in zip(state.points, state.probs):
                single = Constellation([s], [1.0])
                v, e = _scaled_state_law(c, single, fading, 1.0).entropy(cfg)
                h_cond += p * v
                e2 += p * e
            rate, err = h_y - h_cond - h_s, e1 + e2
        else:
            def h_given_a(a):
                return _scaled_state_law(c * a, state, DiscretePmf([1.0], [1.0]), gvar, offsets).entropy(cfg)

            h_y_a, err = _expect_over_fading(fading, h_given_a, n_nodes)
            rate = h_y_a - UNIT_GAUSSIAN_ENTROPY - h_s
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return RateResult(rate, f"state_amplification_{mode.value}/{method}", err, n,
                      {"negative": rate < 0, "H_S": h_s, "mode": mode.value})


def _sa_mc(params, state, fading, mode, n, seed):
    rng = np.random.default_rng(seed)
    c, P = params.c, params.P
    s = rng.choice(state.points, size=n, p=state.probs)
    a = np.asarray(fading.sample(rng, n), dtype=float)
    x = rng.normal(0.0, math.sqrt(P), n)
    z = rng.standard_normal(n)
    y = x + c * a * s + z
    logp = np.log(state.probs)
    if mode is CsiMode.RCSI:
        lp_y = logsumexp(logp + _norm_logpdf(y[:, None], c * a[:, None] * state.points, P + 1.0), axis=1)
        lp_cond = _norm_logpdf(z, 0.0, 1.0)
    else:
        lp_y = _scaled_state_law(c, state, fading, P + 1.0).logpdf(y)
        lp_cond = np.empty(n)
        t = c * a * s + z
        for sv in state.points:
            sel = s == sv
            law = _scaled_state_law(c, Constellation([sv], [1.0]), fading, 1.0)
            lp_cond[sel] = law.logpdf(t[sel])
    return _batch_mean((lp_cond - lp_y) / LN2)


def outer_bound(params, state, fading, mode=CsiMode.NCSI, cfg=DEFAULT_CONFIG, **kwargs):
    """Outer-bound template: the state-amplification rate plus 4 (NCSI) or 6 (RCSI) bits.

    The separation condition of the matching mode is checked and reported in
    ``details``; the bound is only claimed when ``details["valid"]`` is True.
    """
    mode = _mode(mode)
    inner = state_amplification_rate(params, state, fading, mode, cfg, **kwargs)
    check = geometry.ncsi_min_gap if mode is CsiMode.NCSI else geometry.rcsi_min_gap
    report = check(params, state, fading)
    const = OUTER_BOUND_CONSTANT[mode.value]
    details = {"inner_rate": inner.rate, "additive_constant": const,
               "min_gap": report.min_gap, "valid": report.satisfied,
               "caveat": BOUND_CAVEAT, "mode": mode.value}
    if report.note:
        details["condition_note"] = report.note
    return RateResult(inner.rate + const, f"outer_bound_{mode.value}", inner.numeric_error,
                      inner.samples_used, details)


# -- no transmitter state knowledge vs linear cancellation ------------------------

def _linear_rate(params, state, fading, alpha, kvals, cfg, n_nodes):
    """I(Y; G | A) for X = sqrt(P)(alpha G - sqrt(1-alpha^2) K(S))."""
    P, c = params.P, params.c
    shift = -math.sqrt(max(1.0 - alpha * alpha, 0.0) * P) * kvals
    sig_y = math.sqrt(alpha * alpha * P + 1.0)

    def g(a):
        means = shift + c * a * state.points
        h1, e1 = mixture_entropy(_mixture(means, state.probs, sig_y), cfg, full_output=True)
        h2, e2 = mixture_entropy(_mixture(means, state.probs, 1.0), cfg, full_output=True)
        return h1 - h2, e1 + e2

    return _expect_over_fading(fading, g, n_nodes)


def no_csit_rate(params, state, fading, strategy=None, cfg=DEFAULT_CONFIG, n_nodes=DEFAULT_FADING_NODES):
    """Rates with receiver fading knowledge.

    ``GaussianInput`` gives I(Y;X|A) with X ~ N(0, P) ignoring the state.
    ``LinearCancel`` gives I(Y;G|A) for the linear state-dependent scheme and
    returns the best alpha over its grid in ``details["alpha"]``.
    """
    strategy = GaussianInput() if strategy is None else strategy
    if not isinstance(state, Constellation):
        raise InvalidInputError("state must be a discrete Constellation")
    if isinstance(strategy, GaussianInput):
        zeros = np.zeros(len(state))
        rate, err = _linear_rate(params, state, fading, 1.0, zeros, cfg, n_nodes)
        return RateResult(rate, "no_csit/gaussian_input", err, 0, {})
    if isinstance(strategy, LinearCancel):
        kvals = strategy.k_values(state)
        table = []
        for alpha in strategy.grid():
            r, e = _linear_rate(params, state, fading, alpha, kvals, cfg, n_nodes)
            table.append((alpha, r, e))
        best = max(table, key=lambda row: row[1])
        return RateResult(best[1], "no_csit/linear_cancel", best[2], 0,
                          {"alpha": best[0], "sweep": [list(row) for row in table]})
    raise InvalidInputError(f"unsupported strategy {strategy!r}")


def identity_residual(params, state, fading, cfg=DEFAULT_CONFIG, n_nodes=DEFAULT_FADING_NODES):
    """Both sides of I(Y;X,S|A) - H(S) = I(Y;X|A) - H(S|X,A,Y) for X ~ N(0, P).

    The left side uses the output entropy alone. The right side adds the
    state-interference entropy h(caS + Z) and the posterior equivocation of S,
    which is integrated from the component posteriors rather than from a
    marginal entropy.
    """
    c = params.c
    sig_y = math.sqrt(params.P + 1.0)
    h_s = discrete_entropy(state.probs)

    def h_y(a):
        return mixture_entropy(_mixture(c * a * state.points, state.probs, sig_y), cfg, full_output=True)

    def mi_x(a):
        h1, e1 = h_y(a)
        h2, e2 = mixture_entropy(_mixture(c * a * state.points, state.probs, 1.0), cfg, full_output=True)
        return h1 - h2, e1 + e2

    def equivocation(a):
        return mixture_label_entropy(GaussianMixture(c * a * state.points, state.probs, 1.0),
                                     cfg, full_output=True)

    lhs = _expect_over_fading(fading, h_y, n_nodes)[0] - UNIT_GAUSSIAN_ENTROPY - h_s
    rhs = (_expect_over_fading(fading, mi_x, n_nodes)[0]
           - _expect_over_fading(fading, equivocation, n_nodes)[0])
    return lhs, rhs
