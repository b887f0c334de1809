"""Simulation and tail-constant estimation for bivariate triangular
stochastic recurrence equations.

The state recursion multiplies by an upper-triangular random 2x2 matrix
and adds random noise. The two coordinates can carry power-law tails with
different indices; when the indices coincide the first coordinate picks
up an extra log-power factor whose exponent and constant this package
predicts and measures.
"""

from .distributions import (Constant, Dist, Lognormal, Normal, Scaled,
                            SignedLognormal, TwoSidedPareto, Uniform,
                            abs_moment, abs_moment_derivative,
                            abs_normal_moment, dist_from_dict, dist_to_dict,
                            log_abs_moment, log_moment_curvature, mean,
                            sample, signed_moment, tilted)
from .errors import (ArgumentOutOfRange, DegenerateTail, InsufficientSupport,
                     LogMomentUndefined, MomentDiverges, NoRoot,
                     NonPositiveOrderStat, NotContractive, RegimeMismatch,
                     RequiresEqualDiagonal, RequiresExactTilt, RequiresMuZero,
                     TiltUnsupported, TrisreError, UnsupportedRegime,
                     WeightDegenerate)
from .estimates import EstimateWithError, combined_se
from .model import (EqualDiagonal, IndependentEntries, IndependentOffDiagonal,
                    Innovation, ProportionalToDiagonal, TriangularSRE,
                    draw_innovation, draw_innovations, model_from_dict,
                    model_to_dict, step)
from .regime import (CheckResult, RegimeReport, SignSummary, classify,
                     lyapunov_estimate, solve_tail_index)
from .rng import RngStream, default_workers
from .scenarios import (AsymptoticPrediction, ScenarioConfig, ScenarioReport,
                        builtin_scenarios, emit_report, load_config, predict,
                        run_scenario, run_suite)
from .stationary import (StationaryBatch, StationarySample, cross_sum_brute,
                         cross_sum_scan, iterate_forward, sample_cross_sum,
                         sample_cross_sum_batch, sample_pair_perpetuity_batch,
                         sample_perpetuity_batch, sample_stationary,
                         sample_stationary_batch, truncation_depth,
                         univariate_model)
from .tails import (EmpiricalTail, ccdf, default_log_grid,
                    goldie_constant_direct, goldie_constant_direct_for_laws,
                    goldie_constant_perpetuity, grey_constants, hill,
                    log_factor_regression)
from .tilting import (CouplingRate, PartialSumStudy, SnapshotMoments,
                      TiltedCoupling, clt_constant, coupling_sum_moments,
                      estimate_coupling_rate, estimate_coupling_weight,
                      expect_tilted, perpetuity_sample,
                      perpetuity_sample_batch, tilted_coupling,
                      tilted_offdiag_moments, tilted_ratio_log_drift)

__version__ = "0.1.0"
