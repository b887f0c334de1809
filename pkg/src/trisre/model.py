"""Bivariate upper-triangular SRE model: coupling menu and innovations.

One time step multiplies the state by [[a11, a12], [0, a22]] and adds
(b1, b2). The coupling describes the joint per-step law of the five
entries; within a step they may be dependent, across steps they are iid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .distributions import Dist
from .rng import RngStream


@dataclass(frozen=True)
class ProportionalToDiagonal:
    """a12 = xi * a11 with xi drawn independently of the diagonal."""

    factor_law: Dist


@dataclass(frozen=True)
class IndependentOffDiagonal:
    a12: Dist


OffDiagMode = ProportionalToDiagonal | IndependentOffDiagonal


@dataclass(frozen=True)
class IndependentEntries:
    a11: Dist
    a12: Dist
    a22: Dist
    b1: Dist
    b2: Dist


@dataclass(frozen=True)
class EqualDiagonal:
    """a11 = a22 = d almost surely; d must have no atom at zero."""

    d: Dist
    a12_mode: OffDiagMode
    b1: Dist
    b2: Dist

    def __post_init__(self):
        if dist.has_atom_at_zero(self.d):
            raise ValueError("EqualDiagonal requires a diagonal law with no "
                             "atom at zero")


TriangularSRE = IndependentEntries | EqualDiagonal


@dataclass(frozen=True)
class Innovation:
    a11: float
    a12: float
    a22: float
    b1: float
    b2: float


@dataclass
class InnovationBatch:
    """Arrays of shape (m,) holding one joint step for m paths."""

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    b1: np.ndarray
    b2: np.ndarray


def diag_laws(model: TriangularSRE) -> tuple[Dist, Dist]:
    if isinstance(model, IndependentEntries):
        return model.a11, model.a22
    return model.d, model.d


def b_laws(model: TriangularSRE) -> tuple[Dist, Dist]:
    return model.b1, model.b2


@dataclass(frozen=True)
class _ProductLaw:
    """Internal marker for the product of two independent menu laws.

    Only the moment functionals are needed downstream, so this never
    surfaces in sampling or serialization.
    """

    x: Dist
    y: Dist


def offdiag_law(model: TriangularSRE):
    """Marginal law of a12 (for moment bookkeeping only; under the
    proportional coupling a12 is dependent on the diagonal)."""
    if isinstance(model, IndependentEntries):
        return model.a12
    if isinstance(model.a12_mode, IndependentOffDiagonal):
        return model.a12_mode.a12
    return _ProductLaw(model.a12_mode.factor_law, model.d)


def offdiag_abs_moment(model: TriangularSRE, beta: float) -> float:
    law = offdiag_law(model)
    if isinstance(law, _ProductLaw):
        return dist.abs_moment(law.x, beta) * dist.abs_moment(law.y, beta)
    return dist.abs_moment(law, beta)


def offdiag_moment_sup(model: TriangularSRE) -> float:
    law = offdiag_law(model)
    if isinstance(law, _ProductLaw):
        return min(dist.moment_sup(law.x), dist.moment_sup(law.y))
    return dist.moment_sup(law)


def offdiag_is_zero(model: TriangularSRE) -> bool:
    law = offdiag_law(model)
    if isinstance(law, _ProductLaw):
        return dist.is_zero_pointmass(law.x) or dist.is_zero_pointmass(law.y)
    return dist.is_zero_pointmass(law)


def offdiag_negative_possible(model: TriangularSRE) -> bool:
    law = offdiag_law(model)
    if isinstance(law, _ProductLaw):
        if dist.is_zero_pointmass(law.x) or dist.is_zero_pointmass(law.y):
            return False
        return dist.prob_negative(law.x) > 0 or dist.prob_negative(law.y) > 0
    return dist.prob_negative(law) > 0


def draw_innovations(model: TriangularSRE, m: int, rng: RngStream,
                     tilt: tuple[str, Dist] | None = None) -> InnovationBatch:
    """One joint step for m paths, honouring the coupling.

    tilt = ("first"|"second", law) swaps the named diagonal's marginal
    for the given (tilted) law. The |.|^alpha weight is a function of the
    diagonal alone, so the conditional law of the other entries given the
    diagonal, and hence the coupling, is unchanged.
    """
    if isinstance(model, IndependentEntries):
        a11_law, a22_law = model.a11, model.a22
        if tilt is not None:
            which, law = tilt
            if which == "first":
                a11_law = law
            elif which == "second":
                a22_law = law
            else:
                raise ValueError("tilt target must be 'first' or 'second'")
        return InnovationBatch(
            a11=dist.sample(a11_law, rng, m),
            a12=dist.sample(model.a12, rng, m),
            a22=dist.sample(a22_law, rng, m),
            b1=dist.sample(model.b1, rng, m),
            b2=dist.sample(model.b2, rng, m),
        )
    d_law = model.d if tilt is None else tilt[1]
    d = dist.sample(d_law, rng, m)
    if isinstance(model.a12_mode, ProportionalToDiagonal):
        a12 = dist.sample(model.a12_mode.factor_law, rng, m) * d
    else:
        a12 = dist.sample(model.a12_mode.a12, rng, m)
    return InnovationBatch(a11=d, a12=a12, a22=d,
                           b1=dist.sample(model.b1, rng, m),
                           b2=dist.sample(model.b2, rng, m))


def draw_innovation(model: TriangularSRE, rng: RngStream) -> Innovation:
    batch = draw_innovations(model, 1, rng)
    return Innovation(float(batch.a11[0]), float(batch.a12[0]),
                      float(batch.a22[0]), float(batch.b1[0]),
                      float(batch.b2[0]))


def step(model: TriangularSRE, w: tuple[float, float],
         innov: Innovation) -> tuple[float, float]:
    """One forward application of the affine map."""
    w1, w2 = w
    return (innov.a11 * w1 + innov.a12 * w2 + innov.b1,
            innov.a22 * w2 + innov.b2)


def step_batch(w1: np.ndarray, w2: np.ndarray, batch: InnovationBatch):
    return (batch.a11 * w1 + batch.a12 * w2 + batch.b1,
            batch.a22 * w2 + batch.b2)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def model_to_dict(model: TriangularSRE) -> dict:
    if isinstance(model, IndependentEntries):
        return {"coupling": "independent_entries",
                "a11": dist.dist_to_dict(model.a11),
                "a12": dist.dist_to_dict(model.a12),
                "a22": dist.dist_to_dict(model.a22),
                "b1": dist.dist_to_dict(model.b1),
                "b2": dist.dist_to_dict(model.b2)}
    if isinstance(model.a12_mode, ProportionalToDiagonal):
        mode = {"mode": "proportional_to_diagonal",
                "factor_law": dist.dist_to_dict(model.a12_mode.factor_law)}
    else:
        mode = {"mode": "independent",
                "a12": dist.dist_to_dict(model.a12_mode.a12)}
    return {"coupling": "equal_diagonal",
            "d": dist.dist_to_dict(model.d),
            "a12_mode": mode,
            "b1": dist.dist_to_dict(model.b1),
            "b2": dist.dist_to_dict(model.b2)}


def model_from_dict(d: dict) -> TriangularSRE:
    coupling = d["coupling"]
    if coupling == "independent_entries":
        return IndependentEntries(
            a11=dist.dist_from_dict(d["a11"]),
            a12=dist.dist_from_dict(d["a12"]),
            a22=dist.dist_from_dict(d["a22"]),
            b1=dist.dist_from_dict(d["b1"]),
            b2=dist.dist_from_dict(d["b2"]))
    if coupling == "equal_diagonal":
        mode_d = d["a12_mode"]
        mode: OffDiagMode
        if mode_d["mode"] == "proportional_to_diagonal":
            mode = ProportionalToDiagonal(dist.dist_from_dict(mode_d["factor_law"]))
        elif mode_d["mode"] == "independent":
            mode = IndependentOffDiagonal(dist.dist_from_dict(mode_d["a12"]))
        else:
            raise ValueError(f"unknown a12 mode {mode_d['mode']!r}")
        return EqualDiagonal(d=dist.dist_from_dict(d["d"]), a12_mode=mode,
                             b1=dist.dist_from_dict(d["b1"]),
                             b2=dist.dist_from_dict(d["b2"]))
    raise ValueError(f"unknown coupling {coupling!r}")
