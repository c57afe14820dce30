"""Channel ingredients: state constellations, fading laws, power and gain.

The channel is ``Y = X + c*A*S + Z`` with Z ~ N(0, 1), S drawn from a finite
constellation known to the transmitter and A an i.i.d. fading coefficient.
"""

from dataclasses import dataclass
import math
from functools import singledispatch

import numpy as np

from .errors import InvalidInputError

NOISE_MODES = ("gaussian", "residual")


def _as_pmf(points, probs, what):
    pts = np.array(points, dtype=float).ravel()
    pr = np.array(probs, dtype=float).ravel()
    if pts.size < 1 or pts.shape != pr.shape:
        raise InvalidInputError(f"{what}: points and probs must be non-empty and equally long")
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError(f"{what}: points must be finite")
    if np.any(np.diff(pts) <= 0):
        raise InvalidInputError(f"{what}: points must be strictly increasing")
    if np.any(pr < 0) or abs(pr.sum() - 1.0) > 1e-12:
        raise InvalidInputError(f"{what}: probs must be nonnegative and sum to 1")
    pts.flags.writeable = False
    pr.flags.writeable = False
    return pts, pr


@dataclass(frozen=True, eq=False)
class Constellation:
    """Finite real support with probability masses."""

    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        pts, pr = _as_pmf(self.points, self.probs, "Constellation")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)

    def __eq__(self, other):
        return (isinstance(other, Constellation)
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.probs, other.probs))

    def __len__(self):
        return self.points.size

    def mean(self):
        return float(self.probs @ self.points)

    def variance(self):
        return float(self.probs @ (self.points - self.mean()) ** 2)

    def second_moment(self):
        return float(self.probs @ self.points ** 2)

    @classmethod
    def uniform(cls, points):
        pts = np.sort(np.asarray(points, dtype=float))
        return cls(pts, np.full(pts.size, 1.0 / pts.size))

    def to_dict(self):
        return {"points": self.points.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, d):
        if "pam" in d:
            return make_pam(int(d["pam"]))
        return cls(d["points"], d["probs"])


class FadingModel:
    """Base class of the fading laws."""

    kind = ""

    def mean(self):
        raise NotImplementedError

    def variance(self):
        raise NotImplementedError

    def second_moment(self):
        return self.variance() + self.mean() ** 2

    def sample(self, rng, n):
        raise NotImplementedError

    def support(self):
        """Closed hull of the support, possibly infinite."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class DiscretePmf(FadingModel):
    points: np.ndarray
    probs: np.ndarray
    kind = "discrete"

    def __post_init__(self):
        pts, pr = _as_pmf(self.points, self.probs, "DiscretePmf")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)

    def __eq__(self, other):
        return (isinstance(other, DiscretePmf)
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.probs, other.probs))

    def mean(self):
        return float(self.probs @ self.points)

    def variance(self):
        return float(self.probs @ (self.points - self.mean()) ** 2)

    def sample(self, rng, n):
        return rng.choice(self.points, size=n, p=self.probs)

    def support(self):
        return float(self.points[0]), float(self.points[-1])

    def to_dict(self):
        return {"kind": self.kind, "points": self.points.tolist(), "probs": self.probs.tolist()}


@dataclass(frozen=True)
class UniformInterval(FadingModel):
    mu: float
    half_width: float
    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.half_width)):
            raise InvalidInputError("UniformInterval parameters must be finite")
        if not self.half_width > 0:
            raise InvalidInputError("UniformInterval half_width must be positive")

    def mean(self):
        return float(self.mu)

    def variance(self):
        return self.half_width ** 2 / 3.0

    @property
    def lo(self):
        return self.mu - self.half_width

    @property
    def hi(self):
        return self.mu + self.half_width

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    def support(self):
        return self.lo, self.hi

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mu, "half_width": self.half_width}


@dataclass(frozen=True)
class GaussianLaw(FadingModel):
    mu: float
    var: float = 1.0
    kind = "gaussian"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.var)):
            raise InvalidInputError("GaussianLaw parameters must be finite")
        if not self.var > 0:
            raise InvalidInputError("GaussianLaw variance must be positive")

    def mean(self):
        return float(self.mu)

    def variance(self):
        return float(self.var)

    def sample(self, rng, n):
        return rng.normal(self.mu, math.sqrt(self.var), size=n)

    def support(self):
        return -math.inf, math.inf

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mu, "variance": self.var}


def constant_fading(value=1.0):
    """Degenerate fading A == value."""
    return DiscretePmf([value], [1.0])


def fading_from_dict(d):
    kind = d.get("kind")
    if kind == "discrete":
        return DiscretePmf(d["points"], d["probs"])
    if kind == "uniform":
        return UniformInterval(float(d["mean"]), float(d["half_width"]))
    if kind == "gaussian":
        return GaussianLaw(float(d["mean"]), float(d.get("variance", 1.0)))
    if kind == "constant":
        return constant_fading(float(d.get("value", 1.0)))
    raise InvalidInputError(f"unknown fading kind {kind!r}")


@dataclass(frozen=True)
class ChannelParams:
    """Average input power ``P`` and state gain ``c``."""

    P: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.P) and math.isfinite(self.c)):
            raise InvalidInputError("P and c must be finite")
        if not self.P > 0:
            raise InvalidInputError("P must be positive")

    def dirt_power(self, fading):
        """Variance of ``c*A*S`` for a unit-variance zero-mean state: c^2 E[A^2]."""
        return self.c ** 2 * fading.second_moment()

    def to_dict(self):
        return {"P": self.P, "c": self.c}


def make_pam(m):
    """Equiprobable m-PAM with zero mean and unit variance.

    Points are ``(2i - m + 1) * delta`` for ``i = 0..m-1`` with
    ``delta = sqrt(3 / (m^2 - 1))``.
    """
    if int(m) != m or m < 2:
        raise InvalidInputError(f"m-PAM needs an integer m >= 2, got {m}")
    m = int(m)
    delta = math.sqrt(3.0 / (m * m - 1))
    pts = (2.0 * np.arange(m) - m + 1) * delta
    return Constellation(pts, np.full(m, 1.0 / m))


@singledispatch
def standardize(raw):
    """Rescale to unit variance.

    Constellations are also centred; fading laws keep the ratio of mean to
    standard deviation, so the mean becomes ``mu / sigma``.
    """
    raise InvalidInputError(f"cannot standardize {type(raw).__name__}")


def _check_var(var):
    if not var > 0:
        raise InvalidInputError("cannot standardize a zero-variance law")
    return math.sqrt(var)


@standardize.register
def _(raw: Constellation):
    sd = _check_var(raw.variance())
    return Constellation((raw.points - raw.mean()) / sd, raw.probs)


@standardize.register
def _(raw: DiscretePmf):
    sd = _check_var(raw.variance())
    return DiscretePmf(raw.points / sd, raw.probs)


@standardize.register
def _(raw: UniformInterval):
    sd = _check_var(raw.variance())
    return UniformInterval(raw.mu / sd, math.sqrt(3.0))


@standardize.register
def _(raw: GaussianLaw):
    sd = _check_var(raw.variance())
    return GaussianLaw(raw.mu / sd, 1.0)


def round_half_toward_zero(t):
    """Nearest integer, ties resolved toward zero."""
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.ceil(np.abs(t) - 0.5)


def residual_noise(z):
    """Fold Gaussian noise onto the half-integer lattice: ``z - [2z]/2`` with |result| <= 1/4."""
    z = np.asarray(z, dtype=float)
    return z - round_half_toward_zero(2.0 * z) / 2.0


def draw_noise(rng, n, noise_mode):
    if noise_mode not in NOISE_MODES:
        raise InvalidInputError(f"unknown noise_mode {noise_mode!r}")
    z = rng.standard_normal(n)
    return residual_noise(z) if noise_mode == "residual" else z


def sample_block(params, state, fading, x, noise_mode="gaussian", seed=0):
    """Pass an input block through the channel.

    Draws i.i.d. states and fading values, adds noise and returns ``(y, a, s)``.
    The same seed always produces the same block.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("input block must be finite")
    if noise_mode not in NOISE_MODES:
        raise InvalidInputError(f"unknown noise_mode {noise_mode!r}")
    rng = np.random.default_rng(seed)
    n = x.size
    s = rng.choice(state.points, size=n, p=state.probs)
    a = np.asarray(fading.sample(rng, n), dtype=float)
    z = draw_noise(rng, n, noise_mode)
    return x + params.c * a * s + z, a, s
