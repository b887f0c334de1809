"""Reweighted-measure estimators: tilt identities, cross-sum moments,
equal-diagonal drift constants, and the critical per-step rate."""
import math

import numpy as np
import pytest

import trisre as t
from trisre import (Constant, EqualDiagonal, IndependentEntries,
                    IndependentOffDiagonal, Lognormal, Normal,
                    ProportionalToDiagonal, SignedLognormal, Uniform)
from trisre.errors import (RegimeMismatch, RequiresEqualDiagonal,
                           RequiresExactTilt, RequiresMuZero, WeightDegenerate)
from trisre.estimates import EstimateWithError, combined_se


def tilt_benchmark():
    # second coordinate at its critical index 2 (lognormal, exact tilt)
    return IndependentEntries(a11=Lognormal(-2, 1), a12=Lognormal(-1, 0.5),
                              a22=Lognormal(-1, 1), b1=Constant(1.0),
                              b2=Constant(1.0))


def test_expect_tilted_unit_functional_is_exact_in_exact_mode():
    est = t.expect_tilted(tilt_benchmark(), "second", 2.0,
                          lambda path: np.ones(path.v.shape[1]),
                          n=12, N=2000, rng=t.RngStream(1))
    assert est.value == pytest.approx(1.0, rel=1e-12)
    assert est.se == 0.0


def test_expect_tilted_constant_diagonal_power():
    c, alpha, n = 0.5, 1.3, 7
    m = IndependentEntries(a11=Constant(0.9), a12=Constant(1.0),
                           a22=Constant(c), b1=Constant(0.0), b2=Constant(0.0))
    est = t.expect_tilted(m, "second", alpha,
                          lambda path: np.ones(path.v.shape[1]),
                          n=n, N=100, rng=t.RngStream(2))
    assert est.value == pytest.approx(c ** (alpha * n), rel=1e-12)


def mild_benchmark():
    # same critical index 2 on the second coordinate, smaller log-variances
    # so that raw product weights stay usable over short horizons
    return IndependentEntries(a11=Lognormal(-2, 1), a12=Lognormal(-1, 0.5),
                              a22=Lognormal(-0.5, math.sqrt(0.5)),
                              b1=Constant(1.0), b2=Constant(1.0))


def test_raw_weights_average_to_moment_power():
    # mean of prod |a22|^alpha over paths -> (E|A22|^alpha)^n
    m = mild_benchmark()
    alpha, n = 1.0, 3
    lam = t.abs_moment(Lognormal(-0.5, math.sqrt(0.5)), alpha)
    est = t.expect_tilted(m, "second", alpha,
                          lambda path: np.ones(path.v.shape[1]),
                          n=n, N=400_000, rng=t.RngStream(3),
                          mode="weighted_mc")
    assert abs(est.value - lam ** n) <= 4 * est.se


def test_exact_tilt_agrees_with_weighted_mc():
    m = mild_benchmark()
    alpha, n = 1.0, 3

    def f(path):
        return np.abs(path.u).sum(axis=0)

    exact = t.expect_tilted(m, "second", alpha, f, n, 200_000,
                            t.RngStream(4), mode="exact_tilt")
    weighted = t.expect_tilted(m, "second", alpha, f, n, 400_000,
                               t.RngStream(5), mode="weighted_mc")
    assert abs(exact.value - weighted.value) <= \
        4 * combined_se(exact, weighted)


def test_weighted_mc_degenerates_on_long_horizons():
    m = IndependentEntries(a11=Constant(0.5), a12=Constant(1.0),
                           a22=Uniform(0.05, 1.5), b1=Constant(0.0),
                           b2=Constant(0.0))
    with pytest.raises(WeightDegenerate):
        t.expect_tilted(m, "second", 3.0,
                        lambda path: np.ones(path.v.shape[1]),
                        n=120, N=5000, rng=t.RngStream(6))


def test_coupling_weight_zero_offdiagonal_is_zero():
    m = IndependentEntries(a11=Lognormal(-2, 1), a12=Constant(0.0),
                           a22=Lognormal(-1, 1), b1=Constant(1.0),
                           b2=Constant(1.0))
    study = t.estimate_coupling_weight(m, 2.0, 20, 1000, t.RngStream(7))
    snap = study.final()
    assert snap.absolute.value == 0.0
    assert snap.plus.value == 0.0


def test_coupling_weight_constant_entries_deterministic():
    c, g, alpha = 0.8, 0.4, 1.7
    m = IndependentEntries(a11=Constant(c), a12=Constant(g), a22=Constant(c),
                           b1=Constant(0.0), b2=Constant(0.0))
    for n in (2, 6, 11):
        study = t.estimate_coupling_weight(m, alpha, n, 50, t.RngStream(8))
        snap = study.final()
        expected = (n * g * c ** (n - 1)) ** alpha
        assert snap.absolute.value == pytest.approx(expected, rel=1e-9)
        assert snap.minus.value == pytest.approx(0.0, abs=1e-12)


def test_coupling_weight_at_horizon_one_matches_offdiag_moment():
    m = tilt_benchmark()
    alpha2 = 2.0
    study = t.estimate_coupling_weight(m, alpha2, 1, 200_000, t.RngStream(9))
    snap = study.final()
    target = t.abs_moment(Lognormal(-1, 0.5), alpha2)
    assert abs(snap.absolute.value - target) <= 4 * snap.absolute.se


def test_coupling_weight_requires_subcritical_first_diagonal():
    m = IndependentEntries(a11=Lognormal(-1, 1), a12=Lognormal(-1, 0.5),
                           a22=Lognormal(-2, 1), b1=Constant(1.0),
                           b2=Constant(1.0))
    with pytest.raises(RegimeMismatch):
        t.estimate_coupling_weight(m, 4.0, 10, 100, t.RngStream(10))


def test_coupling_weight_monotone_for_nonnegative_entries():
    m = tilt_benchmark()
    study = t.estimate_coupling_weight(m, 2.0, 40, 100_000, t.RngStream(11))
    half, final = study.snapshots
    assert final.absolute.value >= half.absolute.value \
        - 4 * combined_se(final.absolute, half.absolute)


def exact_cross_sum_second_moment(m, n: int) -> float:
    """Closed-form E M_n^2 for independent positive entries: expand the
    double sum over term pairs; every factor is a menu moment."""
    a11, a12, a22 = m.a11, m.a12, m.a22
    lam11 = t.abs_moment(a11, 2.0)
    lam22 = t.abs_moment(a22, 2.0)
    e11, e22, e12 = t.mean(a11), t.mean(a22), t.mean(a12)
    e12_2 = t.abs_moment(a12, 2.0)
    total = 0.0
    for i in range(1, n + 1):
        total += lam11 ** (i - 1) * e12_2 * lam22 ** (n - i)
        for j in range(i + 1, n + 1):
            total += (2 * lam11 ** (i - 1) * (e12 * e11)
                      * (e22 * e11) ** (j - i - 1) * (e22 * e12)
                      * lam22 ** (n - j))
    return total


def test_tilted_moments_match_direct_cross_sum_mc():
    # the whole point of the reweighting: at small n the plain estimator
    # is still usable and the two routes must agree (and match the exact
    # closed-form second moment)
    m = mild_benchmark()
    alpha2, n = 2.0, 5
    exact = exact_cross_sum_second_moment(m, n)
    study = t.estimate_coupling_weight(m, alpha2, n, 400_000, t.RngStream(12))
    tilted_est = study.final().absolute
    direct = t.sample_cross_sum_batch(m, n, 1_000_000, t.RngStream(13))
    vals = np.abs(direct) ** alpha2
    direct_est = EstimateWithError(float(vals.mean()),
                                   float(vals.std() / math.sqrt(vals.size)),
                                   vals.size)
    assert abs(tilted_est.value - direct_est.value) <= \
        4 * combined_se(tilted_est, direct_est)
    assert abs(tilted_est.value - exact) <= 4 * tilted_est.se
    assert abs(direct_est.value - exact) <= 4 * direct_est.se


def test_offdiag_moments_proportional_closed_forms():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=ProportionalToDiagonal(Normal(0, 1)),
                      b1=Constant(1.0), b2=Constant(1.0))
    mu, s2 = t.tilted_offdiag_moments(m, 2.0)
    assert mu == 0.0
    assert s2 == pytest.approx(1.0, rel=1e-12)
    m2 = EqualDiagonal(d=Lognormal(-1, 1),
                       a12_mode=ProportionalToDiagonal(Constant(0.5)),
                       b1=Constant(1.0), b2=Constant(1.0))
    mu2, s22 = t.tilted_offdiag_moments(m2, 2.0)
    assert mu2 == pytest.approx(0.5, rel=1e-12)
    assert s22 == pytest.approx(0.25, rel=1e-12)


def test_offdiag_moments_independent_mode_mc_factorizes():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=IndependentOffDiagonal(Normal(0, 1)),
                      b1=Constant(1.0), b2=Constant(1.0))
    mu, s2 = t.tilted_offdiag_moments(m, 2.0, N=400_000, rng=t.RngStream(14))
    assert abs(mu.value) <= 4 * mu.se
    # E[A12^2] * E[|A11|^{2-2}] = 1 * 1
    assert abs(s2.value - 1.0) <= 4 * s2.se


def test_offdiag_moments_requires_equal_diagonal():
    with pytest.raises(RequiresEqualDiagonal):
        t.tilted_offdiag_moments(tilt_benchmark(), 2.0)


def test_offdiag_moments_closed_form_matches_weighted_mc():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=ProportionalToDiagonal(Normal(0.3, 1.0)),
                      b1=Constant(1.0), b2=Constant(1.0))
    mu, s2 = t.tilted_offdiag_moments(m, 2.0)
    rng = t.RngStream(15)
    d = t.sample(Lognormal(-1, 1), rng, 400_000)
    xi = t.sample(Normal(0.3, 1.0), rng, 400_000)
    w = np.abs(d) ** 2.0
    mu_mc = (w * xi).mean()
    mu_se = (w * xi).std() / math.sqrt(d.size)
    s2_mc = (w * xi * xi).mean()
    s2_se = (w * xi * xi).std() / math.sqrt(d.size)
    assert abs(mu - mu_mc) <= 4 * mu_se
    assert abs(s2 - s2_mc) <= 4 * s2_se


def test_clt_constant_values():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=ProportionalToDiagonal(Normal(0, 1)),
                      b1=Constant(1.0), b2=Constant(1.0))
    assert t.clt_constant(m, 2.0) == pytest.approx(1.0, rel=1e-9)
    m4 = EqualDiagonal(d=Lognormal(-1, 1),
                       a12_mode=ProportionalToDiagonal(Normal(0, 2)),
                       b1=Constant(1.0), b2=Constant(1.0))
    assert t.clt_constant(m4, 2.0) == pytest.approx(4.0, rel=1e-9)
    # alpha = 1 with unit drift-derivative: d = exp(N(-1, 2))
    m1 = EqualDiagonal(d=Lognormal(-1, math.sqrt(2)),
                       a12_mode=ProportionalToDiagonal(Normal(0, 1)),
                       b1=Constant(1.0), b2=Constant(1.0))
    alpha1 = t.solve_tail_index(Lognormal(-1, math.sqrt(2)))
    assert alpha1 == pytest.approx(1.0, abs=1e-9)
    assert t.abs_moment_derivative(Lognormal(-1, math.sqrt(2)), 1.0) == \
        pytest.approx(1.0, rel=1e-12)
    assert t.clt_constant(m1, 1.0) == pytest.approx(
        math.sqrt(2 / math.pi), rel=1e-9)


def test_clt_constant_rejects_nonzero_drift():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=ProportionalToDiagonal(Constant(0.5)),
                      b1=Constant(1.0), b2=Constant(1.0))
    with pytest.raises(RequiresMuZero):
        t.clt_constant(m, 2.0)


def test_perpetuity_sample_geometric_and_degenerate():
    # v = 0.5, u = 1: partial sums 2(1 - 2^{-n})
    m = IndependentEntries(a11=Constant(0.5), a12=Constant(1.0),
                           a22=Constant(1.0), b1=Constant(0.0),
                           b2=Constant(0.0))
    tc = t.tilted_coupling(m, "second", 2.0)
    for n in (1, 3, 10):
        x = t.perpetuity_sample(tc, n, t.RngStream(16))
        assert x == pytest.approx(2.0 * (1 - 2.0 ** (-n)), rel=1e-12)
    # v = 0: the sum collapses to its first term
    m0 = IndependentEntries(a11=Constant(0.0), a12=Constant(0.7),
                            a22=Constant(1.0), b1=Constant(0.0),
                            b2=Constant(0.0))
    tc0 = t.tilted_coupling(m0, "second", 2.0)
    assert t.perpetuity_sample(tc0, 5, t.RngStream(17)) == \
        pytest.approx(0.7, rel=1e-15)


def test_perpetuity_sample_requires_exact_tilt():
    m = IndependentEntries(a11=Constant(0.5), a12=Constant(1.0),
                           a22=Uniform(0.1, 1.0), b1=Constant(0.0),
                           b2=Constant(0.0))
    tc = t.tilted_coupling(m, "second", 2.0)
    with pytest.raises(RequiresExactTilt):
        t.perpetuity_sample(tc, 3, t.RngStream(18))


def test_coupling_weight_weighted_fallback_for_untiltable_diagonal():
    m = IndependentEntries(a11=Constant(0.4), a12=Lognormal(-1, 0.5),
                           a22=Uniform(0.2, 1.2), b1=Constant(1.0),
                           b2=Constant(1.0))
    alpha2 = 1.5
    study = t.estimate_coupling_weight(m, alpha2, 3, 400_000, t.RngStream(30))
    assert study.mode == "weighted_mc"
    # horizon-1 snapshot: E|M_1|^alpha = E|a12|^alpha
    first = study.snapshots[0]
    assert first.k == 1
    target = t.abs_moment(Lognormal(-1, 0.5), alpha2)
    assert abs(first.absolute.value - target) <= 4 * first.absolute.se
    with pytest.raises(WeightDegenerate):
        t.estimate_coupling_weight(m, alpha2, 200, 5000, t.RngStream(31))


def rate_benchmark():
    return IndependentEntries(a11=Lognormal(-1, 1), a12=Lognormal(-1, 0.5),
                              a22=Lognormal(-2, math.sqrt(2)),
                              b1=Constant(1.0), b2=Constant(1.0))


def test_coupling_rate_guards():
    with pytest.raises(RegimeMismatch):
        # equal diagonals have their own limit laws
        m = EqualDiagonal(d=Lognormal(-1, 1),
                          a12_mode=ProportionalToDiagonal(Normal(0, 1)),
                          b1=Constant(1.0), b2=Constant(1.0))
        t.estimate_coupling_rate(m, 2.0, 10, 100, t.RngStream(19))
    with pytest.raises(RegimeMismatch):
        # indices differ: not at the shared critical exponent
        t.estimate_coupling_rate(tilt_benchmark(), 2.0, 10, 100,
                                 t.RngStream(20))


def test_coupling_rate_converges_between_horizons():
    rate = t.estimate_coupling_rate(rate_benchmark(), 2.0, 200, 50_000,
                                    t.RngStream(21))
    a_n = rate.rate_at_n.absolute
    a_h = rate.rate_at_half.absolute
    slack = 4 * combined_se(a_n, a_h) + 0.05 * abs(a_n.value)
    assert abs(a_n.value - a_h.value) <= slack
    # all-positive entries: negative side vanishes
    assert rate.rate_windowed.minus.value == pytest.approx(0.0, abs=1e-12)


def test_coupling_rate_matches_tail_of_ratio_perpetuity():
    # independent check of the per-step rate against the stationary tail
    # of the reweighted ratio recursion: rate ~ drift * P(X > x) x^alpha
    model = rate_benchmark()
    alpha = 2.0
    rate = t.estimate_coupling_rate(model, alpha, 200, 100_000,
                                    t.RngStream(22))
    drift = t.tilted_ratio_log_drift(model, alpha, 400_000, t.RngStream(23))
    tc = t.tilted_coupling(model, "second", alpha)
    x = t.perpetuity_sample_batch(tc, 60, 400_000, t.RngStream(24))
    q = np.quantile(np.abs(x), 0.999)
    p_tail = float(np.mean(np.abs(x) > q))
    cross = drift.value * p_tail * q ** alpha
    ratio = cross / rate.rate_windowed.absolute.value
    assert 0.5 <= ratio <= 2.0
