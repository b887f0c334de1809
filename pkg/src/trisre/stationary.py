"""Stationary solution sampling and the cross-coupling partial sums.

The stationary law is reached through the truncated backward series; the
truncation depth comes from an explicit epsilon-moment bound on the
discarded remainder, so every sample carries a certified error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from . import model as mod
from .errors import NotContractive
from .model import TriangularSRE
from .rng import RngStream, map_chunks

_EPS_GRID = np.linspace(0.05, 1.0, 20)


def contraction_exponent(model: TriangularSRE) -> tuple[float, float]:
    """Exponent eps in (0, 1] minimising q = max_i E|A_ii|^eps.

    Raises NotContractive when no grid point gives q < 1.
    """
    d1, d2 = mod.diag_laws(model)
    sup = min(dist.moment_sup(d1), dist.moment_sup(d2),
              dist.moment_sup(model.b1), dist.moment_sup(model.b2),
              mod.offdiag_moment_sup(model))
    best_eps, best_q = None, np.inf
    for eps in _EPS_GRID:
        if eps >= sup:
            break
        q = max(dist.abs_moment(d1, eps), dist.abs_moment(d2, eps))
        if q < best_q:
            best_eps, best_q = float(eps), float(q)
    if best_eps is None or best_q >= 1.0:
        raise NotContractive(
            "no eps in (0,1] gives max_i E|A_ii|^eps < 1")
    return best_eps, best_q


def _series_error_bound(model: TriangularSRE, n: int, eps: float, q: float) -> float:
    """eps-moment bound on everything the depth-n truncation discards.

    Covers the tails of all three backward series and the under-resolution
    of the second coordinate inside the cross series (the n q^{n-1} term).
    """
    cb1 = dist.abs_moment(model.b1, eps)
    cb2 = dist.abs_moment(model.b2, eps)
    ca12 = mod.offdiag_abs_moment(model, eps)
    if q == 0.0:
        geo = 1.0 if n == 1 else 0.0  # 0^0 convention for the n q^{n-1} term
        return geo * ca12 * cb2
    tail = q ** n * (cb1 + cb2 + ca12 * cb2 / (1.0 - q))
    inner = n * q ** (n - 1) * ca12 * cb2
    return (tail + inner) / (1.0 - q)


def truncation_depth(model: TriangularSRE, tol: float) -> tuple[int, float]:
    """Smallest depth whose discarded-remainder bound is below tol^eps."""
    if not tol > 0:
        raise ValueError("tol must be > 0")
    eps, q = contraction_exponent(model)
    target = tol ** eps
    n = 1
    while _series_error_bound(model, n, eps, q) >= target:
        n += 1
        if n > 200_000:
            raise NotContractive("truncation depth exceeds 200000; "
                                 "contraction too weak for this tolerance")
    return n, eps


@dataclass(frozen=True)
class StationarySample:
    w1: float
    w2: float
    w1_own: float     # part driven by b1 through the first diagonal
    w1_cross: float   # part fed by the second coordinate via a12
    truncation_depth: int
    truncation_bound: float


@dataclass
class StationaryBatch:
    w1: np.ndarray
    w2: np.ndarray
    w1_own: np.ndarray
    w1_cross: np.ndarray
    truncation_depth: int
    truncation_bound: float


def _stationary_chunk(model: TriangularSRE, depth: int, m: int,
                      rng: RngStream) -> tuple[np.ndarray, ...]:
    """Backward series over one shared innovation path per sample.

    Index i runs over lags; prefix products use draws 1..i-1. The second
    coordinate seen by lag i is resolved from the tail of the same path,
    which keeps w1 = w1_own + w1_cross an identity of partial sums.
    """
    a22 = np.empty((depth, m))
    b2 = np.empty((depth, m))
    a12_row = np.empty((depth, m))
    pi1_rows = [np.ones(m)]
    pi1 = np.ones(m)
    pi2 = np.ones(m)
    w1_own = np.zeros(m)
    w2 = np.zeros(m)
    for i in range(depth):
        batch = mod.draw_innovations(model, m, rng)
        a22[i] = batch.a22
        b2[i] = batch.b2
        a12_row[i] = batch.a12
        w1_own += pi1 * batch.b1
        w2 += pi2 * batch.b2
        pi1 = pi1 * batch.a11
        pi2 = pi2 * batch.a22
        if i < depth - 1:
            pi1_rows.append(pi1.copy())
    # w2 as seen i lags back, from the tail of the same path
    w2_tail = np.zeros(m)
    w1_cross = np.zeros(m)
    for i in range(depth - 1, -1, -1):
        w1_cross += pi1_rows[i] * a12_row[i] * w2_tail
        if i > 0:
            w2_tail = b2[i] + a22[i] * w2_tail
    return w1_own, w1_cross, w2


def sample_stationary_batch(model: TriangularSRE, tol: float, m: int,
                            rng: RngStream, workers: int | None = None,
                            chunk: int | None = None) -> StationaryBatch:
    depth, eps = truncation_depth(model, tol)
    bound = _series_error_bound(model, depth, eps,
                                contraction_exponent(model)[1]) ** (1.0 / eps)
    if chunk is None:
        chunk = max(1000, min(100_000, int(2e6 / max(depth, 1))))
    parts = map_chunks(m, chunk,
                       lambda sz, sub: _stationary_chunk(model, depth, sz, sub),
                       rng, workers)
    w1_own = np.concatenate([p[0] for p in parts])
    w1_cross = np.concatenate([p[1] for p in parts])
    w2 = np.concatenate([p[2] for p in parts])
    return StationaryBatch(w1=w1_own + w1_cross, w2=w2, w1_own=w1_own,
                           w1_cross=w1_cross, truncation_depth=depth,
                           truncation_bound=bound)


def sample_stationary(model: TriangularSRE, tol: float,
                      rng: RngStream) -> StationarySample:
    b = sample_stationary_batch(model, tol, 1, rng, workers=1)
    return StationarySample(float(b.w1[0]), float(b.w2[0]), float(b.w1_own[0]),
                            float(b.w1_cross[0]), b.truncation_depth,
                            b.truncation_bound)


def iterate_forward(model: TriangularSRE, w0: tuple[np.ndarray, np.ndarray],
                    steps: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Run m parallel chains forward; returns the final states."""
    w1, w2 = np.asarray(w0[0], dtype=float), np.asarray(w0[1], dtype=float)
    m = w1.size
    for _ in range(steps):
        batch = mod.draw_innovations(model, m, rng)
        w1, w2 = mod.step_batch(w1, w2, batch)
    return w1, w2


# ---------------------------------------------------------------------------
# Cross-coupling partial sum: the scalar chain linking the coordinates
# ---------------------------------------------------------------------------

def cross_sum_scan(a11: np.ndarray, a12: np.ndarray, a22: np.ndarray) -> np.ndarray:
    """Cross sum from draws of shape (n, m): term i carries i-1 first-
    diagonal factors, the off-diagonal entry, then n-i second-diagonal
    factors. The scan keeps a running first-diagonal prefix and folds
    each new step into the accumulator."""
    n, m = a11.shape
    s = np.zeros(m)
    p1 = np.ones(m)
    for k in range(n):
        s = s * a22[k] + p1 * a12[k]
        p1 = p1 * a11[k]
    return s


def sample_cross_sum_batch(model: TriangularSRE, n: int, m: int,
                           rng: RngStream) -> np.ndarray:
    """m draws of the depth-n cross sum over fresh innovation paths."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = np.zeros(m)
    p1 = np.ones(m)
    for _ in range(n):
        batch = mod.draw_innovations(model, m, rng)
        s = s * batch.a22 + p1 * batch.a12
        p1 = p1 * batch.a11
    return s


def sample_cross_sum(model: TriangularSRE, n: int, rng: RngStream) -> float:
    return float(sample_cross_sum_batch(model, n, 1, rng)[0])


def cross_sum_brute(a11: np.ndarray, a12: np.ndarray, a22: np.ndarray) -> np.ndarray:
    """Direct triple-product evaluation from given draws of shape (n, m);
    oracle for the scan recursion."""
    n, m = a11.shape
    total = np.zeros(m)
    for i in range(1, n + 1):
        term = np.ones(m)
        for p in range(0, i - 1):
            term = term * a11[p]
        term = term * a12[i - 1]
        for p in range(i, n):
            term = term * a22[p]
        total += term
    return total


# ---------------------------------------------------------------------------
# Univariate perpetuity (used for the scalar tail constants)
# ---------------------------------------------------------------------------

def univariate_model(a_law: dist.Dist, b_law: dist.Dist) -> TriangularSRE:
    """Embed a scalar recursion as the first coordinate of a degenerate
    bivariate model (zero off-diagonal, zero second coordinate)."""
    return mod.IndependentEntries(a11=a_law, a12=dist.Constant(0.0),
                                  a22=dist.Constant(0.0), b1=b_law,
                                  b2=dist.Constant(0.0))


def sample_perpetuity_batch(a_law: dist.Dist, b_law: dist.Dist, tol: float,
                            m: int, rng: RngStream,
                            workers: int | None = None) -> np.ndarray:
    """m stationary draws of the scalar recursion X = A X' + B."""
    batch = sample_stationary_batch(univariate_model(a_law, b_law), tol, m,
                                    rng, workers)
    return batch.w1


def pair_perpetuity_depth(a_law: dist.Dist, b_eps_moment: float,
                          tol: float) -> tuple[int, float]:
    """Truncation depth for a scalar recursion whose (A, B) pairs come
    from a joint sampler; only A's law is known analytically."""
    sup = dist.moment_sup(a_law)
    best_eps, best_q = None, np.inf
    for eps in _EPS_GRID:
        if eps >= sup:
            break
        q = dist.abs_moment(a_law, eps)
        if q < best_q:
            best_eps, best_q = float(eps), float(q)
    if best_eps is None or best_q >= 1.0:
        raise NotContractive("scalar multiplier not contractive on the grid")
    target = tol ** best_eps
    n = 1
    while best_q ** n / (1.0 - best_q) * b_eps_moment >= target:
        n += 1
        if n > 200_000:
            raise NotContractive("depth exceeds 200000")
    return n, best_eps


def sample_pair_perpetuity_batch(pair_sampler, a_law: dist.Dist, tol: float,
                                 m: int, rng: RngStream,
                                 eps_probe: int = 10_000) -> np.ndarray:
    """Stationary draws of X = A X' + B for jointly sampled (A, B) pairs.

    pair_sampler(k, rng) must return arrays (a, b) of shape (k,). The
    truncation analysis uses A's declared law plus a Monte Carlo probe of
    E|B|^eps (safety factor 10).
    """
    eps, _ = contraction_exponent(univariate_model(a_law, dist.Constant(1.0)))
    _, b_probe = pair_sampler(eps_probe, rng.substream(0x50524F42))
    b_eps = float(np.mean(np.abs(b_probe) ** eps)) * 10.0
    depth, _ = pair_perpetuity_depth(a_law, b_eps, tol)
    x = np.zeros(m)
    p = np.ones(m)
    sub = rng.substream(0x50455250)
    for _ in range(depth):
        a, b = pair_sampler(m, sub)
        x = x + p * b
        p = p * a
    return x
