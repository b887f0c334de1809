"""Empirical tail machinery and the scalar tail-constant estimators.

Covers the survival function, the Hill estimator, the regression that
extracts a log-power slowly varying factor, and two independent routes to
the tail constant of a scalar recursion X = A X' + B: the implicit-renewal
(one-step difference) formula and the perpetuity partial-sum limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .distributions import Dist
from .errors import (ArgumentOutOfRange, DegenerateTail, InsufficientSupport,
                     NonPositiveOrderStat, RegimeMismatch)
from .estimates import EstimateWithError, RunningMoments
from .rng import RngStream
from .stationary import sample_perpetuity_batch
from .tilting import SnapshotMoments, _study_from_pairs

_CRITICAL_BAND = 1e-6


@dataclass
class EmpiricalTail:
    """Sorted-descending sample values under a sign convention.

    convention "absolute" stores |x|; "positive" stores x (its tail is
    P(X > t)); "negative" stores -x (its tail is P(-X > t))."""

    values: np.ndarray
    convention: str

    def __init__(self, samples, convention: str = "absolute"):
        samples = np.asarray(samples, dtype=float)
        if samples.size < 2:
            raise ValueError("need at least 2 samples")
        if convention == "absolute":
            data = np.abs(samples)
        elif convention == "positive":
            data = samples.copy()
        elif convention == "negative":
            data = -samples
        else:
            raise ValueError("convention must be absolute|positive|negative")
        self.values = np.sort(data)[::-1]
        self.convention = convention

    @property
    def count(self) -> int:
        return self.values.size


def ccdf(tail: EmpiricalTail, x: float) -> float:
    """Fraction of samples strictly above x."""
    ascending = tail.values[::-1]
    idx = np.searchsorted(ascending, x, side="right")
    return float(tail.count - idx) / tail.count


def hill(tail: EmpiricalTail, k: int) -> EstimateWithError:
    """Hill estimator from the top k log-spacings; SE = alpha_hat/sqrt(k).

    Uses order-statistic ratios, so rescaling the sample by a power of
    two leaves the estimate bit-identical."""
    if not 2 <= k < tail.count:
        raise ValueError("need 2 <= k < sample count")
    top = tail.values[:k + 1]
    if top[k] <= 0.0:
        raise NonPositiveOrderStat("top-(k+1) order statistics must be > 0")
    ratios = top[:k] / top[k]
    s = float(np.sum(np.log(ratios)))
    if s <= 0.0:
        raise DegenerateTail("top order statistics coincide")
    a = k / s
    return EstimateWithError(a, a / math.sqrt(k), k)


def default_log_grid(tail: EmpiricalTail, points: int = 20,
                     lo_q: float = 0.90, hi_q: float = 0.9999) -> np.ndarray:
    """Geometric grid between the lo_q and hi_q empirical quantiles."""
    lo = float(np.quantile(tail.values, lo_q))
    hi = float(np.quantile(tail.values, hi_q))
    if not (lo > 0 and hi > lo):
        raise InsufficientSupport("tail quantiles do not span a positive range")
    return np.geomspace(lo, hi, points)


def log_factor_regression(tail: EmpiricalTail, alpha: float,
                          x_grid: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope of log(x^alpha * ccdf(x)) on log log x.

    The slope estimates the exponent of a (log x)^beta factor multiplying
    an x^{-alpha} tail; alpha comes from theory, never from this fit.
    Returns (beta_hat, intercept, r2)."""
    x_grid = np.asarray(x_grid, dtype=float)
    floor = 50.0 / tail.count
    xs, ys = [], []
    for x in x_grid:
        if x <= 1.0:
            continue
        c = ccdf(tail, x)
        if c <= floor:
            continue
        xs.append(math.log(math.log(x)))
        ys.append(alpha * math.log(x) + math.log(c))
    if len(xs) < 5:
        raise InsufficientSupport(
            f"only {len(xs)} usable grid points (need >= 5 with ccdf above "
            f"{floor:.2g} and x > 1)")
    xarr, yarr = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xarr, yarr, 1)
    fitted = slope * xarr + intercept
    ss_res = float(np.sum((yarr - fitted) ** 2))
    ss_tot = float(np.sum((yarr - yarr.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


# ---------------------------------------------------------------------------
# Scalar tail constants
# ---------------------------------------------------------------------------

def goldie_constant_direct(pair_sampler, x_sampler, alpha: float, rho: float,
                           N: int, rng: RngStream, a_signed: bool,
                           chunk: int = 200_000
                           ) -> tuple[EstimateWithError, EstimateWithError]:
    """One-step difference formula for the tail constants of X = AX' + B.

    pair_sampler(m, rng) -> (a, b) jointly drawn; x_sampler(m, rng) ->
    stationary draws independent of the pairs. For a multiplier that can
    be negative the two constants coincide and come from the absolute
    version (halved)."""
    if rho <= 0:
        raise ArgumentOutOfRange("rho must be > 0")
    acc_p, acc_m = RunningMoments(), RunningMoments()
    done, idx = 0, 0
    base = rng.substream(0x474C4449)  # internal namespace
    while done < N:
        m = min(chunk, N - done)
        sub = base.substream(idx)
        a, b = pair_sampler(m, sub.substream(0))
        x = x_sampler(m, sub.substream(1))
        ax = a * x
        y = ax + b
        if a_signed:
            z = (np.abs(y) ** alpha - np.abs(ax) ** alpha) / (2.0 * alpha * rho)
            acc_p.add(z)
            acc_m.add(z)
        else:
            zp = (np.maximum(y, 0.0) ** alpha
                  - np.maximum(ax, 0.0) ** alpha) / (alpha * rho)
            zm = (np.maximum(-y, 0.0) ** alpha
                  - np.maximum(-ax, 0.0) ** alpha) / (alpha * rho)
            acc_p.add(zp)
            acc_m.add(zm)
        done += m
        idx += 1
    seed = rng.describe()
    return acc_p.estimate(seed), acc_m.estimate(seed)


def goldie_constant_direct_for_laws(a_law: Dist, b_law: Dist, alpha: float,
                                    rho: float, N: int, rng: RngStream,
                                    tol: float = 1e-8
                                    ) -> tuple[EstimateWithError, EstimateWithError]:
    """Direct formula with independent (A, B) laws; the stationary input
    is sampled by the truncated backward series."""

    def pairs(m, r):
        return dist.sample(a_law, r, m), dist.sample(b_law, r, m)

    def xs(m, r):
        return sample_perpetuity_batch(a_law, b_law, tol, m, r, workers=1)

    return goldie_constant_direct(pairs, xs, alpha, rho, N, rng,
                                  a_signed=dist.prob_negative(a_law) > 0)


@dataclass(frozen=True)
class PerpetuityConstants:
    """Tail constants from the perpetuity partial-sum limit, with the raw
    normalised moments at n and n/2 as a convergence diagnostic."""

    c_plus: EstimateWithError
    c_minus: EstimateWithError
    at_n: SnapshotMoments
    at_half: SnapshotMoments
    rate_at_n: SnapshotMoments
    rate_at_half: SnapshotMoments


def goldie_constant_perpetuity(a_law: Dist | None, b_law: Dist | None,
                               alpha: float, rho: float, n: int, N: int,
                               rng: RngStream, pair_sampler=None,
                               gamma: float | None = None
                               ) -> PerpetuityConstants:
    """Perpetuity-limit formula: (alpha rho n)^{-1} E[(X_n^+-)^alpha] for
    the partial sums X_n of the perpetuity series.

    At the critical index the naive sample mean of the alpha-moment is
    dominated by unobservably rare paths, so the moments are accumulated
    through per-step increments (exactly unbiased); the reported constants
    use the late-window growth, which drops the O(1/n) transient of the
    full average. Raw averages at n and n/2 are returned alongside."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if rho <= 0:
        raise ArgumentOutOfRange("rho must be > 0")
    if pair_sampler is None:
        if a_law is None or b_law is None:
            raise ValueError("give laws or a pair_sampler")

        def pair_sampler(m, r):
            return dist.sample(a_law, r, m), dist.sample(b_law, r, m)

    if a_law is not None:
        lam = dist.abs_moment(a_law, alpha)
        if gamma is None:
            gamma = (dist.signed_moment(a_law, alpha, "plus")
                     - dist.signed_moment(a_law, alpha, "minus"))
    else:
        lam = 1.0
        if gamma is None:
            raise ValueError("gamma required when only a sampler is given")
    if lam > 1.0 + _CRITICAL_BAND:
        raise RegimeMismatch(f"E|A|^alpha = {lam:.6g} > 1: moments explode")
    mode = "telescoped" if lam > 1.0 - _CRITICAL_BAND else "plain"
    half = n // 2
    study = _study_from_pairs(pair_sampler, alpha, [half, n], N, rng, mode,
                              step_moment=1.0, gamma=gamma)
    at_half, at_n = study.snapshots
    window = study.windows[0]
    norm_win = 1.0 / (alpha * rho * (n - half))

    def scale(e: EstimateWithError, f: float) -> EstimateWithError:
        return EstimateWithError(e.value * f, e.se * f, e.n_samples, e.seed)

    return PerpetuityConstants(
        c_plus=scale(window.plus, norm_win),
        c_minus=scale(window.minus, norm_win),
        at_n=at_n, at_half=at_half,
        rate_at_n=SnapshotMoments(
            n, scale(at_n.absolute, 1.0 / (alpha * rho * n)),
            scale(at_n.plus, 1.0 / (alpha * rho * n)),
            scale(at_n.minus, 1.0 / (alpha * rho * n))),
        rate_at_half=SnapshotMoments(
            half, scale(at_half.absolute, 1.0 / (alpha * rho * half)),
            scale(at_half.plus, 1.0 / (alpha * rho * half)),
            scale(at_half.minus, 1.0 / (alpha * rho * half))),
    )


def grey_constants(p_alpha: float, q_alpha: float, m_abs: float,
                   m_plus: float, m_minus: float) -> tuple[float, float]:
    """Closed-form tail constants when the additive term is regularly
    varying and the multiplier is strictly subcritical."""
    if not (p_alpha >= 0 and q_alpha >= 0 and abs(p_alpha + q_alpha - 1.0) < 1e-9):
        raise ArgumentOutOfRange("need p, q >= 0 with p + q = 1")
    if m_abs >= 1.0:
        raise ArgumentOutOfRange("need E|A|^alpha < 1")
    denom2 = 1.0 - m_plus + m_minus
    if denom2 <= 0.0:
        raise ArgumentOutOfRange("signed-moment denominator must be positive")
    base = 1.0 / (1.0 - m_abs)
    tiltp = (p_alpha - q_alpha) / denom2
    return 0.5 * (base + tiltp), 0.5 * (base - tiltp)
