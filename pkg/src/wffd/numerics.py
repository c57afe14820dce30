"""Entropy and quadrature primitives shared by the rate and constant computations.

All entropies are in bits.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr

from .errors import ConvergenceError, InvalidInputError

LN2 = math.log(2.0)
#: differential entropy of N(0, 1) in bits, 1/2 log2(2 pi e)
UNIT_GAUSSIAN_ENTROPY = 0.5 * math.log2(2.0 * math.pi * math.e)


def gaussian_entropy(variance):
    """Differential entropy in bits of a Gaussian with the given variance."""
    if not variance > 0:
        raise InvalidInputError(f"variance must be positive, got {variance}")
    return 0.5 * math.log2(2.0 * math.pi * math.e * variance)


@dataclass(frozen=True)
class IntegrationConfig:
    """Controls for the adaptive quadrature.

    Attributes:
        abs_tol: absolute error target of the integral.
        max_subdivisions: cap on the number of interval splits.
        support_clip: how many standard deviations beyond the extreme means
            the integration range extends.
    """

    abs_tol: float = 1e-9
    max_subdivisions: int = 500_000
    support_clip: float = 10.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise InvalidInputError("abs_tol must be positive")
        if self.support_clip < 6:
            raise InvalidInputError("support_clip must be at least 6")
        if self.max_subdivisions < 1:
            raise InvalidInputError("max_subdivisions must be positive")


DEFAULT_CONFIG = IntegrationConfig()


@dataclass(frozen=True)
class GaussianMixture:
    """Mixture of Gaussians sharing one standard deviation.

    ``means`` and ``weights`` are stored as read-only float arrays.
    """

    means: np.ndarray
    weights: np.ndarray
    sigma: float

    def __post_init__(self):
        means = np.array(self.means, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if means.size == 0 or means.shape != weights.shape:
            raise InvalidInputError("means and weights must be non-empty and equally long")
        if not np.all(np.isfinite(means)):
            raise InvalidInputError("mixture means must be finite")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidInputError("mixture weights must be nonnegative and sum to 1")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidInputError("sigma must be positive and finite")
        means.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "sigma", float(self.sigma))

    @classmethod
    def from_components(cls, components, sigma):
        """Build from an iterable of ``(mean, weight)`` pairs."""
        means, weights = zip(*components)
        return cls(np.array(means), np.array(weights), sigma)

    def support(self, clip):
        return (float(self.means.min() - clip * self.sigma),
                float(self.means.max() + clip * self.sigma))

    def logpdf(self, y):
        """Natural-log density evaluated at the points ``y``."""
        y = np.asarray(y, dtype=float)
        keep = self.weights > 0
        mu, logw = self.means[keep], np.log(self.weights[keep])
        z = (y[..., None] - mu) / self.sigma
        comp = logw - 0.5 * z * z - math.log(self.sigma * math.sqrt(2.0 * math.pi))
        return logsumexp(comp, axis=-1)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_intervals: int


def adaptive_simpson(f, a, b, tol, max_subdivisions=500_000, initial_panels=16):
    """Adaptive composite Simpson rule for a vectorised integrand.

    Every active panel is refined in one numpy pass, so ``f`` receives arrays.
    A panel of width ``h`` is accepted when its Richardson error estimate is
    below ``tol * h / (b - a)``.

    Returns:
        QuadResult with the Richardson-corrected value and the summed error
        estimate of the accepted panels.

    Raises:
        ConvergenceError: if more than ``max_subdivisions`` splits are needed.
    """
    if not b > a:
        raise InvalidInputError("integration range must satisfy a < b")
    edges = np.linspace(a, b, int(initial_panels) + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_edges = f(edges)
    f_lo, f_hi, f_mid = f_edges[:-1], f_edges[1:], f(mid)
    density = tol / (b - a)
    total, err_total, splits, accepted = 0.0, 0.0, 0, 0

    while lo.size:
        h = hi - lo
        q1, q3 = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fq = f(np.concatenate([q1, q3]))
        f_q1, f_q3 = fq[: lo.size], fq[lo.size:]
        coarse = h / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
        fine = h / 12.0 * (f_lo + 4.0 * f_q1 + 2.0 * f_mid + 4.0 * f_q3 + f_hi)
        err = np.abs(fine - coarse) / 15.0
        ok = err <= density * h
        total += float(np.sum(fine[ok] + (fine[ok] - coarse[ok]) / 15.0))
        err_total += float(np.sum(err[ok]))
        accepted += int(ok.sum())

        bad = ~ok
        n_bad = int(bad.sum())
        if n_bad == 0:
            break
        splits += n_bad
        if splits > max_subdivisions:
            best = total + float(np.sum(fine[bad]))
            raise ConvergenceError(
                f"adaptive Simpson did not converge within {max_subdivisions} subdivisions",
                best_estimate=best,
                error_estimate=err_total + float(np.sum(err[bad])),
            )
        lo_b, mid_b, hi_b = lo[bad], mid[bad], hi[bad]
        lo = np.concatenate([lo_b, mid_b])
        hi = np.concatenate([mid_b, hi_b])
        mid = np.concatenate([q1[bad], q3[bad]])
        f_lo, f_mid, f_hi = (np.concatenate([f_lo[bad], f_mid[bad]]),
                             np.concatenate([f_q1[bad], f_q3[bad]]),
                             np.concatenate([f_mid[bad], f_hi[bad]]))
    return QuadResult(total, err_total, accepted)


def _neg_plogp_bits(logpdf):
    def integrand(y):
        lp = logpdf(y)
        return np.where(np.isfinite(lp), -np.exp(lp) * lp, 0.0) / LN2
    return integrand


def density_entropy(logpdf, lo, hi, cfg=DEFAULT_CONFIG, scale=1.0, full_output=False):
    """Differential entropy in bits of a density given by its log on ``[lo, hi]``.

    ``scale`` is the smallest length scale of the density and fixes the
    initial panel width.
    """
    panels = int(min(max(16, math.ceil((hi - lo) / scale)), 20_000))
    res = adaptive_simpson(_neg_plogp_bits(logpdf), lo, hi, cfg.abs_tol,
                           cfg.max_subdivisions, panels)
    return (res.value, res.error) if full_output else res.value


def mixture_entropy(mix, cfg=DEFAULT_CONFIG, full_output=False):
    """Differential entropy (bits) of a Gaussian mixture by adaptive quadrature.

    The range is the hull of the means widened by ``cfg.support_clip`` sigmas.
    With ``full_output=True`` returns ``(entropy, error_estimate)``.
    """
    lo, hi = mix.support(cfg.support_clip)
    return density_entropy(mix.logpdf, lo, hi, cfg, mix.sigma, full_output)


def mixture_label_entropy(mix, cfg=DEFAULT_CONFIG, full_output=False):
    """Equivocation H(J | W) in bits, where J is the component label and W the mixture draw.

    Integrates ``p(w) * H(J | W=w)`` directly from the component posteriors.
    This is a separate route from ``mixture_entropy`` and is used to cross-check it.
    """
    keep = mix.weights > 0
    mu, logw = mix.means[keep], np.log(mix.weights[keep])

    def integrand(w):
        z = (np.asarray(w)[..., None] - mu) / mix.sigma
        joint = logw - 0.5 * z * z - math.log(mix.sigma * math.sqrt(2.0 * math.pi))
        marg = logsumexp(joint, axis=-1)
        post = joint - marg[..., None]
        h_post = -np.sum(np.exp(post) * post, axis=-1) / LN2
        return np.exp(marg) * h_post

    lo, hi = mix.support(cfg.support_clip)
    panels = int(min(max(16, math.ceil((hi - lo) / mix.sigma)), 20_000))
    res = adaptive_simpson(integrand, lo, hi, cfg.abs_tol, cfg.max_subdivisions, panels)
    return (res.value, res.error) if full_output else res.value


def discrete_entropy(pmf):
    """Shannon entropy in bits of a finite pmf, with 0 log 0 = 0."""
    p = np.asarray(pmf, dtype=float).ravel()
    if p.size == 0 or np.any(~np.isfinite(p)) or np.any(p < 0):
        raise InvalidInputError("pmf entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidInputError(f"pmf sums to {p.sum()!r}, not 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def std_normal_cdf(x):
    """Standard normal CDF; accepts scalars or arrays of finite values."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("std_normal_cdf needs finite input")
    out = ndtr(arr)
    return float(out) if out.ndim == 0 else out


def gauss_hermite(n):
    """Nodes and weights for expectations under N(0, 1); weights sum to 1."""
    t, w = np.polynomial.hermite_e.hermegauss(n)
    return t, w / math.sqrt(2.0 * math.pi)


def gauss_legendre(n, lo, hi):
    """Nodes and weights for expectations under Uniform(lo, hi); weights sum to 1."""
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * t + 0.5 * (hi + lo), 0.5 * w


def log_box_gauss_pdf(y, lo, hi, sd):
    """Log density of Uniform[lo, hi] + N(0, sd^2) at ``y`` (all arguments broadcast).

    Requires ``hi > lo``. The CDF difference is taken on the side of the box
    that avoids cancellation.
    """
    u = (y - lo) / sd
    w = (y - hi) / sd
    right = w > 0
    l1 = np.where(right, log_ndtr(-w), log_ndtr(u))
    l2 = np.where(right, log_ndtr(-u), log_ndtr(w))
    return l1 + np.log1p(-np.exp(np.minimum(l2 - l1, 0.0))) - np.log(hi - lo)
