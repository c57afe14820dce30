"""Uncoded Monte Carlo check of joint input/state decoding.

Integer, peak-limited inputs are sent through the channel and the receiver
picks the most likely ``(x, s)`` pair, with or without knowledge of the fading
value. With the residual noise ``Z - [2Z]/2`` (bounded by 1/4) and a
separation above 1/2, decoding must be error free.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
import csv
import math
import os

import numpy as np
from scipy.special import logsumexp

from .channel import (NOISE_MODES, Constellation, DiscretePmf, GaussianLaw, UniformInterval,
                      sample_block)
from .errors import InvalidInputError, UnsupportedModelError
from .numerics import gauss_legendre, log_box_gauss_pdf
from .rates import CsiMode

MIN_SYMBOLS = 10_000
WILSON_Z = 1.959963984540054
CSV_COLUMNS = ("mode", "noise_mode", "P", "c", "m", "n", "joint", "state", "input", "seed")
_RESIDUAL_ALIASES = np.arange(-40, 41) / 2.0
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SimConfig:
    n_symbols: int = 100_000
    seed: int = 0
    noise_mode: str = "gaussian"
    mode: CsiMode = CsiMode.NCSI
    n_batches: int = 10

    def __post_init__(self):
        if self.n_symbols < MIN_SYMBOLS:
            raise InvalidInputError(f"n_symbols must be at least {MIN_SYMBOLS}")
        if self.noise_mode not in NOISE_MODES:
            raise InvalidInputError(f"unknown noise_mode {self.noise_mode!r}")
        if self.n_batches < 1:
            raise InvalidInputError("n_batches must be positive")
        object.__setattr__(self, "mode", CsiMode(self.mode))


def wilson_interval(k, n, z=WILSON_Z):
    """95% Wilson score interval for ``k`` successes out of ``n``."""
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class SimResult:
    joint_error_rate: float
    state_error_rate: float
    input_error_rate: float
    n: int
    seed: int
    joint_errors: int = 0
    state_errors: int = 0
    input_errors: int = 0

    def wilson(self, which="joint"):
        return wilson_interval(getattr(self, f"{which}_errors"), self.n)

    def half_width(self, which="joint"):
        lo, hi = self.wilson(which)
        return 0.5 * (hi - lo)

    def to_dict(self):
        d = asdict(self)
        d["wilson"] = {w: list(self.wilson(w)) for w in ("joint", "state", "input")}
        return d


def residual_logpdf(z):
    """Log density of ``Z - [2Z]/2``; ``-inf`` outside [-1/4, 1/4]."""
    z = np.asarray(z, dtype=float)
    t = z[..., None] + _RESIDUAL_ALIASES
    lp = logsumexp(-0.5 * t * t, axis=-1) - _LOG_SQRT_2PI
    return np.where(np.abs(z) <= 0.25, lp, -np.inf)


def _gauss_logpdf(z, var=1.0):
    return -0.5 * z * z / var - 0.5 * np.log(2.0 * np.pi * var)


def _validate_inputs(params, x_const):
    pts = x_const.points
    if not np.all(pts == np.round(pts)):
        raise InvalidInputError("input constellation points must be integers")
    peak = math.ceil(math.sqrt(params.P))
    if np.any(np.abs(pts) > peak):
        raise InvalidInputError(f"input points exceed the peak limit {peak}")


class _Decoder:
    """ML decoder over the candidate grid, ordered by x then s."""

    def __init__(self, params, x_const, state, fading, mode, noise_mode):
        self.c = params.c
        self.cx = np.repeat(x_const.points, len(state))
        self.cs = np.tile(state.points, len(x_const))
        self.fading, self.mode, self.noise_mode = fading, mode, noise_mode

    def _noise_ll(self, r):
        return residual_logpdf(r) if self.noise_mode == "residual" else _gauss_logpdf(r)

    def loglik(self, y, a):
        y = y[:, None]
        c, cx, cs = self.c, self.cx, self.cs
        if self.mode is CsiMode.RCSI:
            return self._noise_ll(y - cx - c * a[:, None] * cs)
        fad = self.fading
        if isinstance(fad, DiscretePmf):
            r = y[..., None] - cx[:, None] - c * cs[:, None] * fad.points
            return logsumexp(np.log(fad.probs) + self._noise_ll(r), axis=-1)
        gain = c * cs
        if isinstance(fad, UniformInterval):
            e1, e2 = gain * fad.lo, gain * fad.hi
            lo, hi = cx + np.minimum(e1, e2), cx + np.maximum(e1, e2)
            point = hi - lo <= 0.0
            if self.noise_mode == "residual":
                # region membership of the noise-dilated image
                inside = (y >= lo - 0.25) & (y <= hi + 0.25)
                return np.where(inside, 0.0, -np.inf)
            with np.errstate(divide="ignore", invalid="ignore"):
                ll = log_box_gauss_pdf(y, lo, np.where(point, lo + 1.0, hi), 1.0)
            return np.where(point, _gauss_logpdf(y - lo), ll)
        if isinstance(fad, GaussianLaw):
            centre = cx + gain * fad.mu
            if self.noise_mode == "gaussian":
                return _gauss_logpdf(y - centre, 1.0 + gain ** 2 * fad.var)
            # integrate the bounded noise against the Gaussian fading density
            zn, zw = gauss_legendre(32, -0.25, 0.25)
            r = y[..., None] - zn  # (n, 1, q)
            sd = np.abs(gain) * math.sqrt(fad.var)
            safe = np.where(sd > 0, sd, 1.0)[:, None]
            dens = _gauss_logpdf((r - centre[:, None]) / safe) - np.log(safe)
            ll = logsumexp(np.log(zw * 0.5) + residual_logpdf(zn) + dens, axis=-1)
            return np.where(sd > 0, ll, residual_logpdf(y - centre))
        raise UnsupportedModelError(f"unsupported fading model {type(fad).__name__}")

    def decode(self, y, a):
        k = np.argmax(self.loglik(y, a), axis=1)  # first maximum = lexicographically smallest
        return self.cx[k], self.cs[k]


def _run_batch(args):
    params, x_const, state, fading, mode, noise_mode, n, seq = args
    seq_x, seq_ch = seq.spawn(2)
    x = np.random.default_rng(seq_x).choice(x_const.points, size=n, p=x_const.probs)
    y, a, s = sample_block(params, state, fading, x, noise_mode, seed=seq_ch)
    dec = _Decoder(params, x_const, state, fading, mode, noise_mode)
    x_hat, s_hat = [], []
    for chunk in range(0, n, 5000):
        xh, sh = dec.decode(y[chunk:chunk + 5000], a[chunk:chunk + 5000])
        x_hat.append(xh)
        s_hat.append(sh)
    x_err = np.concatenate(x_hat) != x
    s_err = np.concatenate(s_hat) != s
    return int(np.sum(x_err | s_err)), int(s_err.sum()), int(x_err.sum())


def run_decoding_sim(cfg, params, x_const, state, fading, jobs=1):
    """Simulate uncoded transmission and ML decoding of ``(x, s)``.

    Symbols are split into ``cfg.n_batches`` batches with independent child
    seeds, so results do not depend on ``jobs``.
    """
    if not isinstance(x_const, Constellation) or not isinstance(state, Constellation):
        raise InvalidInputError("x_const and state must be Constellations")
    _validate_inputs(params, x_const)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_batches)
    sizes = [len(b) for b in np.array_split(np.arange(cfg.n_symbols), cfg.n_batches)]
    tasks = [(params, x_const, state, fading, cfg.mode, cfg.noise_mode, n, seq)
             for n, seq in zip(sizes, children)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_run_batch, tasks))
    else:
        counts = [_run_batch(t) for t in tasks]
    joint, st, inp = (sum(col) for col in zip(*counts))
    n = cfg.n_symbols
    return SimResult(joint / n, st / n, inp / n, n, cfg.seed, joint, st, inp)


def result_row(cfg, params, state, result):
    return {"mode": cfg.mode.value, "noise_mode": cfg.noise_mode, "P": repr(float(params.P)),
            "c": repr(float(params.c)), "m": len(state), "n": result.n,
            "joint": repr(result.joint_error_rate), "state": repr(result.state_error_rate),
            "input": repr(result.input_error_rate), "seed": result.seed}


def append_csv(path, rows):
    """Append result rows, writing the header only when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if new:
            writer.writeheader()
        writer.writerows(rows)
