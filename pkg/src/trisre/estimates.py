"""Monte Carlo point estimates with standard errors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    se: float
    n_samples: int
    seed: str = ""

    def band(self, k: float = 4.0) -> tuple[float, float]:
        return (self.value - k * self.se, self.value + k * self.se)

    def to_dict(self) -> dict:
        return {"value": self.value, "se": self.se,
                "n_samples": self.n_samples, "seed": self.seed}


def combined_se(a: EstimateWithError, b: EstimateWithError) -> float:
    return math.hypot(a.se, b.se)


class RunningMoments:
    """Mergeable (sum, sum of squares, count) accumulator."""

    __slots__ = ("s1", "s2", "n")

    def __init__(self):
        self.s1 = 0.0
        self.s2 = 0.0
        self.n = 0

    def add(self, values) -> None:
        v = np.asarray(values, dtype=float)
        self.s1 += float(v.sum())
        self.s2 += float((v * v).sum())
        self.n += v.size

    def merge(self, other: "RunningMoments") -> None:
        self.s1 += other.s1
        self.s2 += other.s2
        self.n += other.n

    def estimate(self, seed: str = "") -> EstimateWithError:
        if self.n == 0:
            raise ValueError("no samples accumulated")
        mean = self.s1 / self.n
        var = max(self.s2 / self.n - mean * mean, 0.0)
        se = math.sqrt(var / self.n)
        return EstimateWithError(mean, se, self.n, seed)
