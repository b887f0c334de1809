"""Tail-index solving, Lyapunov estimation, and regime classification."""
import math

import numpy as np
import pytest

import trisre as t
from trisre import (Constant, EqualDiagonal, IndependentEntries,
                    IndependentOffDiagonal, Lognormal, Normal,
                    ProportionalToDiagonal, SignedLognormal, TwoSidedPareto,
                    Uniform)
from trisre.errors import NoRoot, NotContractive
from trisre.regime import (CASE_COORD1_KG, CASE_EQUAL_DIAG_ZERO_DRIFT,
                           CASE_UNSUPPORTED)


def test_solve_tail_index_lognormal_closed_form():
    assert t.solve_tail_index(Lognormal(-1, 1)) == pytest.approx(2.0, abs=1e-9)
    assert t.solve_tail_index(Lognormal(-2, 1)) == pytest.approx(4.0, abs=1e-9)
    assert t.solve_tail_index(Lognormal(-0.5, 0.5)) == pytest.approx(
        4.0, abs=1e-9)


def test_solve_tail_index_sign_blind():
    for p in (0.0, 0.3, 1.0):
        assert t.solve_tail_index(SignedLognormal(-1, 1, p)) == \
            pytest.approx(2.0, abs=1e-9)


def test_solve_tail_index_root_correctness_across_menu():
    specs = [Lognormal(-0.7, 0.9), SignedLognormal(-1.3, 1.1, 0.2),
             TwoSidedPareto(3.0, 0.5, 0.6),
             t.Scaled(Lognormal(-1.0, 0.8), 0.9)]
    for spec in specs:
        alpha = t.solve_tail_index(spec)
        assert abs(t.abs_moment(spec, alpha) - 1.0) <= 1e-9


def test_solve_tail_index_errors():
    with pytest.raises(NotContractive):
        t.solve_tail_index(Lognormal(0.1, 0.1))
    with pytest.raises(NotContractive):
        t.solve_tail_index(Constant(2.0))
    with pytest.raises(NoRoot):
        t.solve_tail_index(Constant(0.5))
    with pytest.raises(NoRoot):
        t.solve_tail_index(Uniform(-0.5, 0.5))


def test_log_moment_is_convex_across_menu():
    specs = [Lognormal(-1, 1), SignedLognormal(-1, 1, 0.4), Normal(0, 0.8),
             Uniform(-0.9, 0.9), TwoSidedPareto(5.0, 0.5, 0.5),
             t.Scaled(Lognormal(-1, 0.5), 0.7)]
    from trisre.distributions import moment_sup
    for spec in specs:
        hi = min(moment_sup(spec) * 0.9, 6.0)
        betas = np.linspace(0.05, hi, 50)
        g = np.array([math.log(t.abs_moment(spec, b)) for b in betas])
        second = g[2:] - 2 * g[1:-1] + g[:-2]
        assert np.all(second >= -1e-7)


def test_derivative_positive_at_root():
    for spec in (Lognormal(-1, 1), Lognormal(-2, 1),
                 SignedLognormal(-1.5, 1.2, 0.5)):
        alpha = t.solve_tail_index(spec)
        assert t.abs_moment_derivative(spec, alpha) > 0


def test_derivative_examples():
    assert t.abs_moment_derivative(Lognormal(-1, 1), 2.0) == \
        pytest.approx(1.0, rel=1e-12)
    assert t.abs_moment_derivative(Lognormal(-2, 1), 4.0) == \
        pytest.approx(2.0, rel=1e-12)
    c, alpha = 0.5, 1.3
    assert t.abs_moment_derivative(Constant(c), alpha) == \
        pytest.approx(c ** alpha * math.log(c), rel=1e-12)
    assert t.abs_moment_derivative(Constant(c), alpha) < 0


def test_lyapunov_diagonal_constants_exact():
    m = IndependentEntries(a11=Constant(0.5), a12=Constant(0.0),
                           a22=Constant(0.5), b1=Constant(1.0),
                           b2=Constant(1.0))
    est = t.lyapunov_estimate(m, 200, 4, t.RngStream(1))
    assert est.value == pytest.approx(math.log(0.5), abs=1e-12)
    assert est.se == 0.0


def test_lyapunov_triangular_constants_match_direct_product():
    a, g, c = 0.5, 1.0, 0.25
    n = 10_000
    m = IndependentEntries(a11=Constant(a), a12=Constant(g),
                           a22=Constant(c), b1=Constant(1.0),
                           b2=Constant(1.0))
    est = t.lyapunov_estimate(m, n, 3, t.RngStream(2))
    # closed-form oracle for the n-step product norm, evaluated in logs:
    # off-diagonal entry is g * sum a^i c^{n-1-i} = g a^{n-1} (1-r^n)/(1-r)
    r = c / a
    off_log = math.log(g) + (n - 1) * math.log(a) + math.log((1 - r ** n) / (1 - r))
    p11_log = n * math.log(a)
    p22_log = n * math.log(c)
    # spectral norm of [[p11, off], [0, p22]]: off dominates exponentially,
    # norm^2 = largest eigenvalue of the Gram matrix; compute via scaling
    s = max(p11_log, off_log, p22_log)
    p11, off, p22 = (math.exp(p11_log - s), math.exp(off_log - s),
                     math.exp(p22_log - s))
    g11 = p11 * p11
    g12 = p11 * off
    g22 = off * off + p22 * p22
    tr, det = g11 + g22, g11 * g22 - g12 * g12
    lam = 0.5 * (tr + math.sqrt(max(tr * tr - 4 * det, 0.0)))
    oracle = (s + 0.5 * math.log(lam)) / n
    assert est.value == pytest.approx(oracle, abs=1e-9)
    # the top exponent is the max diagonal log, up to the O(log n / n) term
    assert est.value == pytest.approx(math.log(a), abs=1e-3)


def test_lyapunov_negative_for_stable_model():
    m = IndependentEntries(a11=Lognormal(-1, 1), a12=Normal(0, 1),
                           a22=Lognormal(-2, 1), b1=Constant(1.0),
                           b2=Constant(1.0))
    est = t.lyapunov_estimate(m, 10_000, 100, t.RngStream(3))
    assert est.value + 3 * est.se < 0


def test_classify_distinct_indices():
    m = IndependentEntries(a11=Lognormal(-1, 1), a12=Lognormal(-1, 0.5),
                           a22=Lognormal(-2, 1), b1=Constant(1.0),
                           b2=Constant(1.0))
    rep = t.classify(m)
    assert rep.theorem_case == CASE_COORD1_KG
    assert rep.alpha1 == pytest.approx(2.0, abs=1e-9)
    assert rep.alpha2 == pytest.approx(4.0, abs=1e-9)
    assert rep.regime1 == rep.regime2 == "kesten_goldie"
    assert rep.rho1 == pytest.approx(1.0, rel=1e-9)
    assert rep.rho2 == pytest.approx(2.0, rel=1e-9)


def test_classify_equal_diagonal_zero_drift():
    m = EqualDiagonal(d=Lognormal(-1, 1),
                      a12_mode=ProportionalToDiagonal(Normal(0, 1)),
                      b1=Constant(1.0), b2=Constant(1.0))
    rep = t.classify(m)
    assert rep.theorem_case == CASE_EQUAL_DIAG_ZERO_DRIFT
    assert rep.diagonal_relation == "equal_as"
    assert rep.offdiag_drift == 0.0


def test_classify_zero_offdiagonal_unsupported():
    m = IndependentEntries(a11=Lognormal(-1, 1), a12=Constant(0.0),
                           a22=Lognormal(-2, 1), b1=Constant(1.0),
                           b2=Constant(1.0))
    rep = t.classify(m)
    assert rep.theorem_case == CASE_UNSUPPORTED
    assert rep.check("offdiag_nondegenerate").status == "fail"


def test_classify_grey_coordinate():
    m = IndependentEntries(a11=Lognormal(-1, 0.8), a12=Lognormal(-1, 0.5),
                           a22=Lognormal(-2, 1),
                           b1=TwoSidedPareto(2.0, 1.0, 0.7),
                           b2=Constant(1.0))
    rep = t.classify(m)
    assert rep.regime1 == "grey"
    assert rep.alpha1 == pytest.approx(2.0)
    assert rep.regime2 == "kesten_goldie"
    assert rep.theorem_case == "coord1_dominant_grey"


def test_classify_deterministic():
    m = IndependentEntries(a11=Lognormal(-1, 1), a12=Lognormal(-1, 0.5),
                           a22=Lognormal(-2, math.sqrt(2)), b1=Constant(1.0),
                           b2=Constant(1.0))
    r1 = t.classify(m, t.RngStream(99))
    r2 = t.classify(m, t.RngStream(99))
    assert r1.to_dict() == r2.to_dict()


def test_classify_signed_first_coordinate_reports_distinctness_probe():
    m = IndependentEntries(a11=SignedLognormal(-1, 1, 0.8),
                           a12=Lognormal(-1, 0.5), a22=Lognormal(-2, 1),
                           b1=Constant(1.0), b2=Constant(1.0))
    rep = t.classify(m)
    assert rep.theorem_case == CASE_COORD1_KG
    chk = rep.check("component_tail_distinctness")
    assert chk.status == "unverifiable"
    assert "vs" in chk.detail
