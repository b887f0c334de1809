"""Scenario runner: map a classified model to its predicted tail
asymptote, simulate, estimate, and emit machine-readable reports.

The predicted first-coordinate tail has the shape
    P(+-W1 > x) ~ c_pm * x^{-tail_index} * (log x)^{log_beta} * ell
with ell a constant slowly varying factor (the scale of a regularly
varying noise term, 1 otherwise).
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distributions as dist
from . import model as mod
from .errors import InsufficientSupport, TrisreError, UnsupportedRegime
from .estimates import EstimateWithError
from .model import (EqualDiagonal, IndependentEntries, IndependentOffDiagonal,
                    ProportionalToDiagonal, TriangularSRE, model_from_dict,
                    model_to_dict)
from .regime import (CASE_COORD1_GREY, CASE_COORD1_KG, CASE_COORD2_GREY,
                     CASE_COORD2_KG, CASE_DISTINCT_DIAG_EQUAL_INDEX,
                     CASE_EQUAL_DIAG_NONZERO_DRIFT, CASE_EQUAL_DIAG_ZERO_DRIFT,
                     CASE_UNSUPPORTED, RegimeReport, classify)
from .rng import RngStream
from .stationary import sample_stationary_batch
from .tails import (EmpiricalTail, ccdf, default_log_grid,
                    goldie_constant_direct, hill, log_factor_regression)
from .tilting import (clt_constant, estimate_coupling_rate,
                      estimate_coupling_weight, tilted_offdiag_moments)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Config and prediction types
# ---------------------------------------------------------------------------

@dataclass
class ScenarioConfig:
    name: str
    model: TriangularSRE
    n_samples: int = 100_000
    tol: float = 1e-8
    seed: int = 20_240_601
    mn_horizon: int = 400
    weight_horizon: int = 50
    constant_samples: int = 200_000
    out_dir: str | None = None

    def __post_init__(self):
        if self.n_samples <= 0 or self.constant_samples <= 0:
            raise ValueError("sample counts must be positive")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        if self.mn_horizon <= 0 or self.weight_horizon <= 0:
            raise ValueError("horizons must be positive")

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "name": self.name,
                "model": model_to_dict(self.model),
                "n_samples": self.n_samples, "tol": self.tol,
                "seed": self.seed, "mn_horizon": self.mn_horizon,
                "weight_horizon": self.weight_horizon,
                "constant_samples": self.constant_samples,
                "out_dir": self.out_dir}

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        schema = d.get("schema")
        if schema != SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema {schema!r}")
        return ScenarioConfig(
            name=d["name"], model=model_from_dict(d["model"]),
            n_samples=int(d.get("n_samples", 100_000)),
            tol=float(d.get("tol", 1e-8)),
            seed=int(d.get("seed", 20_240_601)),
            mn_horizon=int(d.get("mn_horizon", 400)),
            weight_horizon=int(d.get("weight_horizon", 50)),
            constant_samples=int(d.get("constant_samples", 200_000)),
            out_dir=d.get("out_dir"))


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return ScenarioConfig.from_dict(json.load(fh))


def _const_to_jsonable(c) -> dict | float | None:
    if isinstance(c, EstimateWithError):
        return c.to_dict()
    return c


def _const_value(c) -> float:
    return c.value if isinstance(c, EstimateWithError) else float(c)


def _const_se(c) -> float:
    return c.se if isinstance(c, EstimateWithError) else 0.0


@dataclass
class AsymptoticPrediction:
    tail_index: float
    log_beta: float
    c_plus: float | EstimateWithError
    c_minus: float | EstimateWithError
    source: str
    constant_formula: str
    ell_scale: float = 1.0

    def to_dict(self) -> dict:
        return {"tail_index": self.tail_index, "log_beta": self.log_beta,
                "c_plus": _const_to_jsonable(self.c_plus),
                "c_minus": _const_to_jsonable(self.c_minus),
                "source": self.source,
                "constant_formula": self.constant_formula,
                "ell_scale": self.ell_scale}


# ---------------------------------------------------------------------------
# Prediction dispatch
# ---------------------------------------------------------------------------

def _product_estimate(pairs: list[tuple]) -> EstimateWithError:
    """Sum of products of independent estimates, first-order error."""
    value = 0.0
    var = 0.0
    n = 0
    for a, b in pairs:
        av, ase = _const_value(a), _const_se(a)
        bv, bse = _const_value(b), _const_se(b)
        value += av * bv
        var += (ase * bv) ** 2 + (av * bse) ** 2
        n = max(n, getattr(a, "n_samples", 0), getattr(b, "n_samples", 0))
    return EstimateWithError(value, math.sqrt(var), n)


def _scale_estimate(c, factor: float):
    if isinstance(c, EstimateWithError):
        return EstimateWithError(c.value * factor, c.se * abs(factor),
                                 c.n_samples, c.seed)
    return float(c) * factor


def _w2_goldie(model: TriangularSRE, alpha2: float, rho2: float, N: int,
               tol: float, rng: RngStream):
    """Tail constants of the second coordinate's scalar recursion."""
    d2 = mod.diag_laws(model)[1]

    def pairs(m, r):
        batch = mod.draw_innovations(model, m, r)
        return batch.a22, batch.b2

    def xs(m, r):
        return sample_stationary_batch(model, tol, m, r, workers=1).w2

    signed = dist.prob_negative(d2) > 0
    return goldie_constant_direct(pairs, xs, alpha2, rho2, N, rng,
                                  a_signed=signed)


def predict(model: TriangularSRE, *, report: RegimeReport | None = None,
            constant_samples: int = 200_000, mn_horizon: int = 400,
            weight_horizon: int = 50, tol: float = 1e-8,
            rng: RngStream | None = None) -> AsymptoticPrediction:
    """Predicted tail asymptote of the first coordinate for a supported
    model; raises UnsupportedRegime otherwise."""
    if rng is None:
        rng = RngStream(0x9D1C7)
    if report is None:
        report = classify(model, rng.substream(0))
    case = report.theorem_case
    if case == CASE_UNSUPPORTED:
        raise UnsupportedRegime("no implemented asymptotic case applies; "
                                "see the regime report checks")
    d1, d2 = mod.diag_laws(model)

    if case == CASE_COORD1_KG:
        alpha1, rho1 = report.alpha1, report.rho1

        def pair_sampler(m, r):
            batch = mod.draw_innovations(model, m, r.substream(0))
            w2 = sample_stationary_batch(model, tol, m, r.substream(1),
                                         workers=1).w2
            return batch.a11, batch.b1 + batch.a12 * w2

        def x_sampler(m, r):
            return sample_stationary_batch(model, tol, m, r, workers=1).w1

        signed = report.sign_case.a11_negative_possible
        cp, cm = goldie_constant_direct(pair_sampler, x_sampler, alpha1, rho1,
                                        constant_samples, rng.substream(1),
                                        a_signed=signed)
        formula = ("one_step_difference_absolute_halved" if signed
                   else "one_step_difference_signed_parts")
        return AsymptoticPrediction(alpha1, 0.0, cp, cm, case, formula)

    if case == CASE_COORD1_GREY:
        alpha1 = report.alpha1
        b1 = model.b1
        assert isinstance(b1, dist.TwoSidedPareto)
        m_abs = dist.abs_moment(d1, alpha1)
        m_p = dist.signed_moment(d1, alpha1, "plus")
        m_m = dist.signed_moment(d1, alpha1, "minus")
        from .tails import grey_constants
        cp, cm = grey_constants(b1.p_pos, 1.0 - b1.p_pos, m_abs, m_p, m_m)
        return AsymptoticPrediction(alpha1, 0.0, cp, cm, case,
                                    "rv_noise_closed_form",
                                    ell_scale=b1.scale ** alpha1)

    if case == CASE_COORD2_KG:
        alpha2, rho2 = report.alpha2, report.rho2
        c2p, c2m = _w2_goldie(model, alpha2, rho2, constant_samples,
                              tol, rng.substream(2))
        study = estimate_coupling_weight(model, alpha2, weight_horizon,
                                         constant_samples, rng.substream(3))
        snap = study.final()
        if report.sign_case.a22_negative_possible:
            c2 = _product_estimate([(c2p, 1.0), (c2m, 1.0)])
            half_w = _scale_estimate(snap.absolute, 0.5)
            c = _product_estimate([(c2, half_w)])
            return AsymptoticPrediction(alpha2, 0.0, c, c, case,
                                        "inherited_absolute_weight_halved")
        cp = _product_estimate([(c2p, snap.plus), (c2m, snap.minus)])
        cm = _product_estimate([(c2p, snap.minus), (c2m, snap.plus)])
        return AsymptoticPrediction(alpha2, 0.0, cp, cm, case,
                                    "inherited_signed_weights")

    if case == CASE_COORD2_GREY:
        alpha2 = report.alpha2
        b2 = model.b2
        assert isinstance(b2, dist.TwoSidedPareto)
        p, q = b2.p_pos, 1.0 - b2.p_pos
        lam11 = dist.abs_moment(d1, alpha2)
        lam22 = dist.abs_moment(d2, alpha2)
        qgeo = max(lam11, lam22)
        c_geo = mod.offdiag_abs_moment(model, alpha2)
        from .tilting import coupling_sum_moments
        # deep enough that the geometric term bound C i q^{i-1} is far
        # below any truncation threshold we might apply afterwards
        def bound(i: int) -> float:
            return c_geo * i * qgeo ** (i - 1)

        i_cap = 1
        while bound(i_cap) > 1e-8 * c_geo and i_cap < 200:
            i_cap += 1
        study = coupling_sum_moments(model, alpha2, list(range(1, i_cap + 1)),
                                     constant_samples, rng.substream(4))
        # sum terms until the bound drops below 1e-4 of the partial sum
        sum_p, sum_m = 0.0, 0.0
        var_p, var_m = 0.0, 0.0
        nmax = 0
        for snap in study.snapshots:
            i = snap.k
            wp, wm = snap.plus, snap.minus
            sum_p += wp.value * p + wm.value * q
            sum_m += wp.value * q + wm.value * p
            var_p += (wp.se * p) ** 2 + (wm.se * q) ** 2
            var_m += (wp.se * q) ** 2 + (wm.se * p) ** 2
            nmax = max(nmax, wp.n_samples)
            if bound(i) < 1e-4 * max(sum_p + sum_m, 1e-300):
                break
        cp = EstimateWithError(sum_p, math.sqrt(var_p), nmax)
        cm = EstimateWithError(sum_m, math.sqrt(var_m), nmax)
        return AsymptoticPrediction(alpha2, 0.0, cp, cm, case,
                                    "rv_noise_weight_series",
                                    ell_scale=b2.scale ** alpha2)

    if case in (CASE_EQUAL_DIAG_ZERO_DRIFT, CASE_EQUAL_DIAG_NONZERO_DRIFT):
        alpha, rho1 = report.alpha1, report.rho1
        c2p, c2m = _w2_goldie(model, report.alpha2, report.rho2,
                              constant_samples, tol, rng.substream(5))
        if case == CASE_EQUAL_DIAG_ZERO_DRIFT:
            cc = clt_constant(model, alpha, rng=rng.substream(6))
            c2 = _product_estimate([(c2p, 1.0), (c2m, 1.0)])
            c = _scale_estimate(c2, cc / 2.0)
            return AsymptoticPrediction(alpha, alpha / 2.0, c, c, case,
                                        "gaussian_limit_constant")
        drift = report.offdiag_drift
        mu = _const_value(drift)
        factor = abs(mu) ** alpha * rho1 ** (-alpha)
        if mu > 0:
            cp, cm = _scale_estimate(c2p, factor), _scale_estimate(c2m, factor)
        else:
            cp, cm = _scale_estimate(c2m, factor), _scale_estimate(c2p, factor)
        return AsymptoticPrediction(alpha, alpha, cp, cm, case,
                                    "drift_limit_constant")

    if case == CASE_DISTINCT_DIAG_EQUAL_INDEX:
        alpha, rho1 = report.alpha1, report.rho1
        c2p, c2m = _w2_goldie(model, report.alpha2, report.rho2,
                              constant_samples, tol, rng.substream(7))
        rate = estimate_coupling_rate(model, alpha, mn_horizon,
                                      constant_samples, rng.substream(8))
        crp, crm = rate.rate_windowed.plus, rate.rate_windowed.minus
        a22_neg = report.sign_case.a22_negative_possible
        a11_neg = report.sign_case.a11_negative_possible
        if a22_neg or a11_neg:
            c2 = _product_estimate([(c2p, 1.0), (c2m, 1.0)])
            cr = rate.rate_windowed.absolute
            d_both = _scale_estimate(_product_estimate([(c2, cr)]), 0.5)
            dp = dm = d_both
            formula = "coupling_rate_absolute_halved"
        else:
            dp = _product_estimate([(c2p, crp), (c2m, crm)])
            dm = _product_estimate([(c2p, crm), (c2m, crp)])
            formula = "coupling_rate_signed"
        factor = alpha / rho1
        return AsymptoticPrediction(alpha, 1.0, _scale_estimate(dp, factor),
                                    _scale_estimate(dm, factor), case, formula)

    raise UnsupportedRegime(f"unhandled case {case}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    check_id: str
    predicted: float
    estimated: float
    se: float
    band: str
    passed: bool

    def to_dict(self) -> dict:
        return {"check_id": self.check_id, "predicted": self.predicted,
                "estimated": self.estimated, "se": self.se,
                "band": self.band, "pass": self.passed}


@dataclass
class ScenarioReport:
    name: str
    config: dict
    regime: dict
    prediction: dict | None
    prediction_error: str | None
    empirical: dict
    verdicts: list[Verdict]
    runtime_seconds: float
    seed_provenance: str
    notes: list[str] = field(default_factory=list)

    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"name": self.name, "config": self.config,
                "regime": self.regime, "prediction": self.prediction,
                "prediction_error": self.prediction_error,
                "empirical": self.empirical,
                "verdicts": [v.to_dict() for v in self.verdicts],
                "runtime_seconds": self.runtime_seconds,
                "seed_provenance": self.seed_provenance,
                "notes": self.notes}


def _hill_block(samples: np.ndarray, name: str) -> dict:
    out = {}
    n = samples.size
    k = max(2, min(int(n ** (2.0 / 3.0)), n - 1))
    for conv in ("absolute", "positive", "negative"):
        tail = EmpiricalTail(samples, conv)
        try:
            est = hill(tail, k)
            out[conv] = {"alpha_hat": est.value, "se": est.se, "k": k}
        except TrisreError as exc:
            out[conv] = {"error": str(exc), "k": k}
    out["n"] = n
    return out


def run_scenario(config: ScenarioConfig, workers: int | None = None) -> ScenarioReport:
    t0 = time.time()
    rng = RngStream(config.seed)
    notes: list[str] = []
    regime = classify(config.model, rng.substream(1))

    prediction = None
    prediction_error = None
    try:
        prediction = predict(config.model, report=regime,
                             constant_samples=config.constant_samples,
                             mn_horizon=config.mn_horizon,
                             weight_horizon=config.weight_horizon,
                             tol=config.tol, rng=rng.substream(2))
    except TrisreError as exc:
        prediction_error = f"{type(exc).__name__}: {exc}"

    batch = sample_stationary_batch(config.model, config.tol,
                                    config.n_samples, rng.substream(3),
                                    workers=workers)
    empirical: dict = {
        "truncation_depth": batch.truncation_depth,
        "truncation_bound": batch.truncation_bound,
        "w2": _hill_block(batch.w2, "w2"),
        "w1": _hill_block(batch.w1, "w1"),
    }

    verdicts: list[Verdict] = []

    def add_stat_verdict(check_id, predicted, estimated, se, extra_band=0.0):
        band = max(4.0 * se, extra_band)
        verdicts.append(Verdict(check_id, predicted, estimated, se,
                                f"|diff| <= max(4se, {extra_band:.3g}) = {band:.4g}",
                                abs(estimated - predicted) <= band))

    alpha2 = regime.alpha2
    if alpha2 is not None and "alpha_hat" in empirical["w2"]["absolute"]:
        est = empirical["w2"]["absolute"]
        add_stat_verdict("hill_w2_abs", alpha2, est["alpha_hat"], est["se"],
                         extra_band=0.10 * alpha2)

    if prediction is not None:
        a = prediction.tail_index
        if "alpha_hat" in empirical["w1"]["absolute"]:
            est = empirical["w1"]["absolute"]
            add_stat_verdict("hill_w1_abs", a, est["alpha_hat"], est["se"],
                             extra_band=0.10 * a)

        tail_abs = EmpiricalTail(batch.w1, "absolute")
        try:
            grid = default_log_grid(tail_abs)
            beta_hat, intercept, r2 = log_factor_regression(tail_abs, a, grid)
            empirical["log_factor_regression"] = {
                "beta_hat": beta_hat, "intercept": intercept, "r2": r2,
                "grid_lo": float(grid[0]), "grid_hi": float(grid[-1])}
            verdicts.append(Verdict(
                "log_factor_beta", prediction.log_beta, beta_hat, 0.0,
                "|diff| <= 0.25 (absolute band; regression bias dominates)",
                abs(beta_hat - prediction.log_beta) <= 0.25))
        except InsufficientSupport as exc:
            empirical["log_factor_regression"] = {"error": str(exc)}

        # tail-constant comparison on the positive side, over the grid
        cp_val = _const_value(prediction.c_plus)
        cp_se = _const_se(prediction.c_plus)
        if cp_val > 0:
            tail_pos = EmpiricalTail(batch.w1, "positive")
            try:
                grid = default_log_grid(tail_pos)
                vals = []
                for x in grid:
                    c = ccdf(tail_pos, x)
                    if c * batch.w1.size < 50:
                        continue
                    denom = (math.log(x)) ** prediction.log_beta \
                        if x > 1 else None
                    if denom is None or denom <= 0:
                        continue
                    vals.append(x ** a * c / denom / prediction.ell_scale)
                if len(vals) >= 5:
                    emp_c = float(np.mean(vals))
                    empirical["tail_constant_plus"] = {
                        "empirical": emp_c, "predicted": cp_val,
                        "predicted_se": cp_se, "grid_points": len(vals)}
                    ratio = emp_c / cp_val
                    verdicts.append(Verdict(
                        "tail_constant_plus_factor", cp_val, emp_c, cp_se,
                        "ratio in [0.5, 2.0] (pre-asymptotic factor band)",
                        0.5 <= ratio <= 2.0))
                else:
                    empirical["tail_constant_plus"] = {
                        "error": "insufficient grid support"}
            except InsufficientSupport as exc:
                empirical["tail_constant_plus"] = {"error": str(exc)}

        csum = _const_value(prediction.c_plus) + _const_value(prediction.c_minus)
        csum_se = math.hypot(_const_se(prediction.c_plus),
                             _const_se(prediction.c_minus))
        verdicts.append(Verdict(
            "constants_sum_positive", 0.0, csum, csum_se,
            "c_plus + c_minus - 4se > 0", csum - 4.0 * csum_se > 0.0))

    for chk in regime.checks:
        if chk.status == "unverifiable":
            notes.append(f"{chk.check_id}: {chk.detail}")

    report = ScenarioReport(
        name=config.name, config=config.to_dict(), regime=regime.to_dict(),
        prediction=prediction.to_dict() if prediction else None,
        prediction_error=prediction_error, empirical=empirical,
        verdicts=verdicts, runtime_seconds=time.time() - t0,
        seed_provenance=f"seed={config.seed}", notes=notes)
    return report


def emit_report(report: ScenarioReport, out_dir: str | Path,
                formats: tuple[str, ...] = ("json", "csv")) -> list[Path]:
    """Write report files; JSON nested with sorted keys, CSV one row per
    verdict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / f"{report.name}.json"
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
        written.append(p)
    if "csv" in formats:
        p = out / f"{report.name}.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check_id", "predicted", "estimated", "se",
                             "band", "pass"])
            for v in report.verdicts:
                writer.writerow([v.check_id, repr(v.predicted),
                                 repr(v.estimated), repr(v.se), v.band,
                                 v.passed])
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# Built-in scenario suite: one configuration per supported asymptotic case
# ---------------------------------------------------------------------------

def builtin_scenarios(quick: bool = False) -> list[ScenarioConfig]:
    n = 10_000 if quick else 1_000_000
    cn = 20_000 if quick else 200_000
    mn = 200 if quick else 400
    LN = dist.Lognormal
    C = dist.Constant

    configs = [
        ScenarioConfig(
            name="coord1_dominant_kg",
            model=IndependentEntries(a11=LN(-1.0, 1.0), a12=LN(-1.0, 0.5),
                                     a22=LN(-2.0, 1.0), b1=C(1.0), b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
        ScenarioConfig(
            name="coord1_dominant_grey",
            model=IndependentEntries(
                a11=LN(-1.0, 0.7),
                a12=LN(-1.5, 0.5),
                a22=LN(-2.0, 1.0),
                b1=dist.TwoSidedPareto(2.0, 2.0, 0.7),
                b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
        ScenarioConfig(
            name="coord2_dominant_kg",
            model=IndependentEntries(a11=LN(-2.0, 1.0), a12=LN(0.0, 0.5),
                                     a22=LN(-1.0, 1.0), b1=C(0.1), b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn, weight_horizon=60),
        ScenarioConfig(
            name="coord2_dominant_grey",
            model=IndependentEntries(
                a11=LN(-2.0, 1.0),
                a12=LN(0.0, 0.5),
                a22=LN(-1.0, 0.7),
                b1=C(0.1),
                b2=dist.TwoSidedPareto(2.0, 2.0, 0.7)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
        ScenarioConfig(
            name="equal_diag_zero_drift",
            model=EqualDiagonal(d=LN(-1.0, 1.0),
                                a12_mode=ProportionalToDiagonal(
                                    dist.Normal(0.0, 1.0)),
                                b1=C(1.0), b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
        ScenarioConfig(
            name="equal_diag_nonzero_drift",
            model=EqualDiagonal(d=LN(-1.0, 1.0),
                                a12_mode=ProportionalToDiagonal(C(0.5)),
                                b1=C(1.0), b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
        ScenarioConfig(
            name="distinct_diag_equal_index",
            model=IndependentEntries(a11=LN(-1.0, 1.0), a12=LN(-1.0, 0.5),
                                     a22=LN(-2.0, math.sqrt(2.0)),
                                     b1=C(1.0), b2=C(1.0)),
            n_samples=n, constant_samples=cn, mn_horizon=mn),
    ]
    return configs


def run_suite(quick: bool = False, out_dir: str | Path = "trisre_out",
              workers: int | None = None,
              formats: tuple[str, ...] = ("json", "csv")) -> list[ScenarioReport]:
    reports = []
    out = Path(out_dir)
    for config in builtin_scenarios(quick):
        report = run_scenario(config, workers=workers)
        emit_report(report, out, formats)
        reports.append(report)
    summary = {
        "schema": SCHEMA_VERSION,
        "quick": quick,
        "scenarios": [{"name": r.name, "all_pass": r.all_pass(),
                       "runtime_seconds": r.runtime_seconds,
                       "n_verdicts": len(r.verdicts)} for r in reports],
    }
    with open(out / "suite_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
    return reports
