"""Scalar distribution menu: sampling, moments, log-moments and tilting.

The menu is a closed family chosen so that every estimator downstream has
exact absolute/signed moments and, where needed, an exact |x|^alpha tilt.
It covers a positive light-tailed multiplier (Lognormal), its signed
variant, bounded and Gaussian noise, a point mass, a regularly varying
two-sided Pareto, and scalar rescalings of any of these.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import LogMomentUndefined, MomentDiverges, TiltUnsupported
from .rng import RngStream

_QUAD_TOL = 1e-11
_FD_STEP = 1e-5


@dataclass(frozen=True)
class Constant:
    c: float


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("Normal sd must be > 0")


@dataclass(frozen=True)
class Lognormal:
    """Law of exp(N(mu, sigma^2)); strictly positive."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Lognormal sigma must be > 0")


@dataclass(frozen=True)
class SignedLognormal:
    """eps * exp(N(mu, sigma^2)) with eps = +1 w.p. p_pos, else -1."""

    mu: float
    sigma: float
    p_pos: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("SignedLognormal sigma must be > 0")
        if not 0.0 <= self.p_pos <= 1.0:
            raise ValueError("p_pos must lie in [0, 1]")


@dataclass(frozen=True)
class TwoSidedPareto:
    """P(X > x) = p_pos (x/scale)^-alpha for x >= scale; mirrored with
    weight 1 - p_pos on the negative side. |X| >= scale almost surely."""

    alpha: float
    scale: float
    p_pos: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("TwoSidedPareto alpha must be > 0")
        if not self.scale > 0:
            raise ValueError("TwoSidedPareto scale must be > 0")
        if not 0.0 <= self.p_pos <= 1.0:
            raise ValueError("p_pos must lie in [0, 1]")


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("Uniform requires a < b")


@dataclass(frozen=True)
class Scaled:
    inner: "Dist"
    factor: float


Dist = Constant | Normal | Lognormal | SignedLognormal | TwoSidedPareto | Uniform | Scaled


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample(spec: Dist, rng: RngStream, size: int | None = None):
    """Draw from the law; advances rng deterministically."""
    g = rng.gen
    n = 1 if size is None else size
    if isinstance(spec, Constant):
        out = np.full(n, spec.c, dtype=float)
    elif isinstance(spec, Normal):
        out = g.normal(spec.mean, spec.sd, size=n)
    elif isinstance(spec, Lognormal):
        out = np.exp(g.normal(spec.mu, spec.sigma, size=n))
    elif isinstance(spec, SignedLognormal):
        mag = np.exp(g.normal(spec.mu, spec.sigma, size=n))
        sign = np.where(g.random(n) < spec.p_pos, 1.0, -1.0)
        out = sign * mag
    elif isinstance(spec, TwoSidedPareto):
        mag = spec.scale * g.random(n) ** (-1.0 / spec.alpha)
        sign = np.where(g.random(n) < spec.p_pos, 1.0, -1.0)
        out = sign * mag
    elif isinstance(spec, Uniform):
        out = g.uniform(spec.a, spec.b, size=n)
    elif isinstance(spec, Scaled):
        out = spec.factor * sample(spec.inner, rng, size=n)
    else:  # pragma: no cover
        raise TypeError(f"unknown spec {spec!r}")
    return float(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def _half_normal_moment(beta: float) -> float:
    # E|N(0,1)|^beta
    return 2.0 ** (beta / 2.0) * math.gamma((beta + 1.0) / 2.0) / math.sqrt(math.pi)


def abs_normal_moment(alpha: float) -> float:
    """E|N|^alpha for the standard normal, alpha >= 0."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return _half_normal_moment(alpha)


def _normal_positive_part_moment(mean: float, sd: float, beta: float) -> float:
    # E[(X^+)^beta] for X ~ N(mean, sd^2), via quadrature on (0, inf).
    def f(x):
        return x ** beta * math.exp(-0.5 * ((x - mean) / sd) ** 2)

    val, _ = integrate.quad(f, 0.0, np.inf, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL,
                            limit=200)
    return val / (sd * math.sqrt(2.0 * math.pi))


def _uniform_abs_antideriv(x: float, beta: float) -> float:
    # antiderivative of |t|^beta: sgn(t) |t|^{beta+1} / (beta+1)
    return math.copysign(abs(x) ** (beta + 1.0) / (beta + 1.0), x)


def abs_moment(spec: Dist, beta: float) -> float:
    """E|X|^beta, exact where the family allows, quadrature otherwise.

    Raises MomentDiverges when beta reaches the Pareto index.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 0.0:
        return 1.0
    if isinstance(spec, Constant):
        return abs(spec.c) ** beta
    if isinstance(spec, Normal):
        if spec.mean == 0.0:
            return spec.sd ** beta * _half_normal_moment(beta)
        return (_normal_positive_part_moment(spec.mean, spec.sd, beta)
                + _normal_positive_part_moment(-spec.mean, spec.sd, beta))
    if isinstance(spec, (Lognormal, SignedLognormal)):
        return math.exp(spec.mu * beta + 0.5 * (spec.sigma * beta) ** 2)
    if isinstance(spec, TwoSidedPareto):
        if beta >= spec.alpha:
            raise MomentDiverges(
                f"E|X|^{beta} infinite for Pareto index {spec.alpha}")
        return spec.alpha * spec.scale ** beta / (spec.alpha - beta)
    if isinstance(spec, Uniform):
        num = _uniform_abs_antideriv(spec.b, beta) - _uniform_abs_antideriv(spec.a, beta)
        return num / (spec.b - spec.a)
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            return 0.0
        return abs(spec.factor) ** beta * abs_moment(spec.inner, beta)
    raise TypeError(f"unknown spec {spec!r}")  # pragma: no cover


def signed_moment(spec: Dist, beta: float, sign: str) -> float:
    """E[(X^+)^beta] or E[(X^-)^beta]; the two sum to abs_moment."""
    if sign not in ("plus", "minus"):
        raise ValueError("sign must be 'plus' or 'minus'")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    plus = sign == "plus"
    if isinstance(spec, Constant):
        c = spec.c if plus else -spec.c
        if c > 0:
            return c ** beta
        return 0.0
    if isinstance(spec, Normal):
        mean = spec.mean if plus else -spec.mean
        if beta == 0.0:
            from scipy.stats import norm
            return float(norm.sf(0.0, loc=mean, scale=spec.sd))
        return _normal_positive_part_moment(mean, spec.sd, beta)
    if isinstance(spec, Lognormal):
        return abs_moment(spec, beta) if plus else 0.0
    if isinstance(spec, SignedLognormal):
        w = spec.p_pos if plus else 1.0 - spec.p_pos
        return w * math.exp(spec.mu * beta + 0.5 * (spec.sigma * beta) ** 2)
    if isinstance(spec, TwoSidedPareto):
        w = spec.p_pos if plus else 1.0 - spec.p_pos
        if beta >= spec.alpha:
            if w == 0.0:
                return 0.0
            raise MomentDiverges(
                f"E[(X^{'+' if plus else '-'})^{beta}] infinite for Pareto "
                f"index {spec.alpha}")
        return w * spec.alpha * spec.scale ** beta / (spec.alpha - beta)
    if isinstance(spec, Uniform):
        a, b = (spec.a, spec.b) if plus else (-spec.b, -spec.a)
        lo, hi = max(a, 0.0), max(b, 0.0)
        if hi <= lo:
            return 0.0
        if beta == 0.0:
            return (hi - lo) / (spec.b - spec.a)
        num = _uniform_abs_antideriv(hi, beta) - _uniform_abs_antideriv(lo, beta)
        return num / (spec.b - spec.a)
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            return 0.0
        inner_sign = sign if spec.factor > 0 else ("minus" if plus else "plus")
        return abs(spec.factor) ** beta * signed_moment(spec.inner, beta, inner_sign)
    raise TypeError(f"unknown spec {spec!r}")  # pragma: no cover


def log_abs_moment(spec: Dist) -> float:
    """E log|X|; raises LogMomentUndefined for laws with an atom at 0."""
    if isinstance(spec, Constant):
        if spec.c == 0.0:
            raise LogMomentUndefined("log|X| undefined for the point mass at 0")
        return math.log(abs(spec.c))
    if isinstance(spec, Normal):
        def f(x):
            s = spec.sd
            dens = (math.exp(-0.5 * ((x - spec.mean) / s) ** 2)
                    + math.exp(-0.5 * ((x + spec.mean) / s) ** 2))
            return math.log(x) * dens / (s * math.sqrt(2.0 * math.pi))

        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=_QUAD_TOL,
                                epsrel=_QUAD_TOL, limit=200)
        return val
    if isinstance(spec, (Lognormal, SignedLognormal)):
        return spec.mu
    if isinstance(spec, TwoSidedPareto):
        return math.log(spec.scale) + 1.0 / spec.alpha
    if isinstance(spec, Uniform):
        def antideriv(x):
            return 0.0 if x == 0.0 else x * math.log(abs(x)) - x

        return (antideriv(spec.b) - antideriv(spec.a)) / (spec.b - spec.a)
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            raise LogMomentUndefined("log|X| undefined for the point mass at 0")
        return math.log(abs(spec.factor)) + log_abs_moment(spec.inner)
    raise TypeError(f"unknown spec {spec!r}")  # pragma: no cover


def abs_moment_derivative(spec: Dist, beta: float) -> float:
    """d/dbeta E|X|^beta = E|X|^beta log|X|.

    Closed form where the menu provides one, central finite differences
    (step 1e-5) on the exact moment function otherwise.
    """
    if isinstance(spec, (Lognormal, SignedLognormal)):
        return (spec.mu + spec.sigma ** 2 * beta) * abs_moment(spec, beta)
    if isinstance(spec, Constant):
        if spec.c == 0.0:
            raise LogMomentUndefined("derivative undefined at the zero point mass")
        return abs(spec.c) ** beta * math.log(abs(spec.c))
    if isinstance(spec, TwoSidedPareto):
        if beta >= spec.alpha:
            raise MomentDiverges("moment infinite at or beyond the Pareto index")
        a, s = spec.alpha, spec.scale
        return a * s ** beta * (math.log(s) * (a - beta) + 1.0) / (a - beta) ** 2
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            raise LogMomentUndefined("derivative undefined at the zero point mass")
        f = abs(spec.factor)
        return f ** beta * (math.log(f) * abs_moment(spec.inner, beta)
                            + abs_moment_derivative(spec.inner, beta))
    h = _FD_STEP
    lo = max(beta - h, 0.0)
    return (abs_moment(spec, beta + h) - abs_moment(spec, lo)) / (beta + h - lo)


def log_moment_curvature(spec: Dist, alpha: float, eps0: float,
                         grid: int = 41) -> float:
    """Half the sup of (log E|X|^beta)'' over [alpha-eps0, alpha+eps0].

    With rho = derivative at alpha this gives the quadratic envelope
    E|X|^{alpha +- eps} <= exp(+-eps rho + C eps^2) for 0 <= eps <= eps0,
    valid when E|X|^alpha = 1.
    """
    h = 1e-4
    betas = np.linspace(max(alpha - eps0, h), alpha + eps0, grid)
    worst = 0.0
    for b in betas:
        g = lambda x: math.log(abs_moment(spec, x))
        second = (g(b + h) - 2.0 * g(b) + g(b - h)) / (h * h)
        worst = max(worst, second)
    return worst / 2.0


def mean(spec: Dist) -> float:
    """E[X] = E[(X^+)^1] - E[(X^-)^1]."""
    return signed_moment(spec, 1.0, "plus") - signed_moment(spec, 1.0, "minus")


def tilted(spec: Dist, alpha: float) -> Dist:
    """The |x|^alpha-weighted law, for families closed under the tilt.

    Lognormal magnitudes shift their log-mean by alpha sigma^2; the weight
    is sign-blind so a signed lognormal keeps its p_pos. Point masses are
    fixed points. Everything else raises TiltUnsupported.
    """
    if isinstance(spec, Constant):
        if spec.c == 0.0:
            raise TiltUnsupported("cannot tilt the point mass at 0")
        return spec
    if isinstance(spec, Lognormal):
        return Lognormal(spec.mu + alpha * spec.sigma ** 2, spec.sigma)
    if isinstance(spec, SignedLognormal):
        return SignedLognormal(spec.mu + alpha * spec.sigma ** 2, spec.sigma,
                               spec.p_pos)
    if isinstance(spec, Scaled):
        return Scaled(tilted(spec.inner, alpha), spec.factor)
    raise TiltUnsupported(
        f"{type(spec).__name__} is not closed under the |x|^alpha tilt; "
        "use weighted Monte Carlo instead")


def is_tiltable(spec: Dist) -> bool:
    try:
        tilted(spec, 1.0)
        return True
    except TiltUnsupported:
        return False


# ---------------------------------------------------------------------------
# Structural metadata used by the regime classifier
# ---------------------------------------------------------------------------

def moment_sup(spec: Dist) -> float:
    """sup{beta : E|X|^beta < infinity}."""
    if isinstance(spec, TwoSidedPareto):
        return spec.alpha
    if isinstance(spec, Scaled):
        return math.inf if spec.factor == 0.0 else moment_sup(spec.inner)
    return math.inf


def is_zero_pointmass(spec: Dist) -> bool:
    if isinstance(spec, Constant):
        return spec.c == 0.0
    if isinstance(spec, Scaled):
        return spec.factor == 0.0 or is_zero_pointmass(spec.inner)
    return False


def has_atom_at_zero(spec: Dist) -> bool:
    return is_zero_pointmass(spec)


def prob_negative(spec: Dist) -> float:
    """P(X < 0), exact for every menu family."""
    if isinstance(spec, Constant):
        return 1.0 if spec.c < 0 else 0.0
    if isinstance(spec, Normal):
        from scipy.stats import norm
        return float(norm.cdf(0.0, loc=spec.mean, scale=spec.sd))
    if isinstance(spec, Lognormal):
        return 0.0
    if isinstance(spec, (SignedLognormal, TwoSidedPareto)):
        return 1.0 - spec.p_pos
    if isinstance(spec, Uniform):
        if spec.b <= 0:
            return 1.0
        if spec.a >= 0:
            return 0.0
        return -spec.a / (spec.b - spec.a)
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            return 0.0
        if spec.factor > 0:
            return prob_negative(spec.inner)
        return prob_positive(spec.inner)
    raise TypeError(f"unknown spec {spec!r}")  # pragma: no cover


def prob_positive(spec: Dist) -> float:
    if isinstance(spec, Constant):
        return 1.0 if spec.c > 0 else 0.0
    if isinstance(spec, Scaled):
        if spec.factor == 0.0:
            return 0.0
        if spec.factor > 0:
            return prob_positive(spec.inner)
        return prob_negative(spec.inner)
    return 1.0 - prob_negative(spec) - (1.0 if is_zero_pointmass(spec) else 0.0)


def is_continuous(spec: Dist) -> bool:
    """True when the law has a density (no atoms); drives the
    non-lattice checks, which are structural rather than statistical."""
    if isinstance(spec, Constant):
        return False
    if isinstance(spec, Scaled):
        return spec.factor != 0.0 and is_continuous(spec.inner)
    return True


# ---------------------------------------------------------------------------
# Serialization (tagged records, the scenario-config wire format)
# ---------------------------------------------------------------------------

def dist_to_dict(spec: Dist) -> dict:
    if isinstance(spec, Constant):
        return {"kind": "constant", "c": spec.c}
    if isinstance(spec, Normal):
        return {"kind": "normal", "mean": spec.mean, "sd": spec.sd}
    if isinstance(spec, Lognormal):
        return {"kind": "lognormal", "mu": spec.mu, "sigma": spec.sigma}
    if isinstance(spec, SignedLognormal):
        return {"kind": "signed_lognormal", "mu": spec.mu, "sigma": spec.sigma,
                "p_pos": spec.p_pos}
    if isinstance(spec, TwoSidedPareto):
        return {"kind": "two_sided_pareto", "alpha": spec.alpha,
                "scale": spec.scale, "p_pos": spec.p_pos}
    if isinstance(spec, Uniform):
        return {"kind": "uniform", "a": spec.a, "b": spec.b}
    if isinstance(spec, Scaled):
        return {"kind": "scaled", "inner": dist_to_dict(spec.inner),
                "factor": spec.factor}
    raise TypeError(f"unknown spec {spec!r}")  # pragma: no cover


def dist_from_dict(d: dict) -> Dist:
    kind = d["kind"]
    if kind == "constant":
        return Constant(float(d["c"]))
    if kind == "normal":
        return Normal(float(d["mean"]), float(d["sd"]))
    if kind == "lognormal":
        return Lognormal(float(d["mu"]), float(d["sigma"]))
    if kind == "signed_lognormal":
        return SignedLognormal(float(d["mu"]), float(d["sigma"]), float(d["p_pos"]))
    if kind == "two_sided_pareto":
        return TwoSidedPareto(float(d["alpha"]), float(d["scale"]), float(d["p_pos"]))
    if kind == "uniform":
        return Uniform(float(d["a"]), float(d["b"]))
    if kind == "scaled":
        return Scaled(dist_from_dict(d["inner"]), float(d["factor"]))
    raise ValueError(f"unknown distribution kind {kind!r}")
