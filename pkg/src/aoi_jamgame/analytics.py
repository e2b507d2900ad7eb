"""Renewal-reward age of a (jamming law, sampling policy) pair.

With i.i.d. stage lengths L = A + u(A) the age sawtooth has area L^2/2 per
stage, so the long-run time-average age is E[L^2] / (2 E[L]). The stage-ratio
convention drops the 1/2; it is what the g-ratio below measures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import (
    JamDistribution,
    SamplingPolicy,
    Tabulated,
    Threshold,
    ZeroStageLength,
    ZeroWait,
)


class AgeConvention(str, enum.Enum):
    TIME_AVERAGE = "time_average"
    STAGE_RATIO = "stage_ratio"


@dataclass(frozen=True)
class AgeValue:
    value: float
    convention: AgeConvention = AgeConvention.TIME_AVERAGE

    @property
    def time_average(self) -> float:
        if self.convention is AgeConvention.TIME_AVERAGE:
            return self.value
        return self.value / 2

    @property
    def stage_ratio(self) -> float:
        if self.convention is AgeConvention.STAGE_RATIO:
            return self.value
        return 2 * self.value

    def to(self, convention: AgeConvention) -> "AgeValue":
        convention = AgeConvention(convention)
        if convention is AgeConvention.TIME_AVERAGE:
            return AgeValue(self.time_average, convention)
        return AgeValue(self.stage_ratio, convention)

    def __float__(self):
        return float(self.value)


def _linear_integrals(x0, x1, l0, l1):
    """Integrals of l and l^2 over [x0, x1] for l linear with end values l0, l1."""
    w = x1 - x0
    return w * (l0 + l1) / 2, w * (l0 * l0 + l0 * l1 + l1 * l1) / 3


def clipped_moments(dist: JamDistribution, betas) -> tuple[np.ndarray, np.ndarray]:
    """E[max(beta, A)] and E[max(beta, A)^2] for an array of thresholds."""
    b = np.asarray(betas, dtype=float)
    e1 = np.zeros_like(b)
    e2 = np.zeros_like(b)
    for x, m in dist.atoms:
        c = np.maximum(b, x)
        e1 += m * c
        e2 += m * c * c
    for lo, hi, d in dist.pieces:
        # flat part max(beta, a) = beta on [lo, min(beta, hi)]
        w_flat = np.clip(b, lo, hi) - lo
        e1 += d * b * w_flat
        e2 += d * b * b * w_flat
        s = np.clip(b, lo, hi)
        e1 += d * (hi * hi - s * s) / 2
        e2 += d * (hi ** 3 - s ** 3) / 3
    return e1, e2


def clipped_moment(dist: JamDistribution, beta: float, k: int) -> float:
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    e1, e2 = clipped_moments(dist, beta)
    return float(e1 if k == 1 else e2)


def _tabulated_moments(dist: JamDistribution, policy: Tabulated) -> tuple[float, float]:
    knots_a = np.array([k[0] for k in policy.knots])
    stage = lambda a: float(a + policy.delay(a))
    e1 = sum(m * stage(x) for x, m in dist.atoms)
    e2 = sum(m * stage(x) ** 2 for x, m in dist.atoms)
    for lo, hi, d in dist.pieces:
        cuts = [lo] + [k for k in knots_a if lo < k < hi] + [hi]
        for x0, x1 in zip(cuts, cuts[1:]):
            i1, i2 = _linear_integrals(x0, x1, stage(x0), stage(x1))
            e1 += d * i1
            e2 += d * i2
    return e1, e2


def stage_moments(dist: JamDistribution, policy: SamplingPolicy) -> tuple[float, float]:
    """E[L] and E[L^2] for the stage length L = A + u(A)."""
    if isinstance(policy, Threshold):
        e1, e2 = clipped_moments(dist, policy.beta)
        return float(e1), float(e2)
    if isinstance(policy, ZeroWait):
        e1, e2 = clipped_moments(dist, 0.0)
        return float(e1), float(e2)
    if isinstance(policy, Tabulated):
        return _tabulated_moments(dist, policy)
    raise TypeError(f"unsupported policy {policy!r}")


def average_age(dist: JamDistribution, policy: SamplingPolicy) -> AgeValue:
    e1, e2 = stage_moments(dist, policy)
    if e1 <= 0:
        raise ZeroStageLength("expected stage length is zero")
    return AgeValue(e2 / (2 * e1), AgeConvention.TIME_AVERAGE)


def g_ratio(beta: float, dist: JamDistribution) -> float:
    """E[max(beta, A)^2] / E[max(beta, A)]; twice the age under Threshold(beta)."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    e1, e2 = clipped_moments(dist, beta)
    if e1 <= 0:
        raise ZeroStageLength("g-ratio denominator vanishes")
    return float(e2 / e1)


def br_residual(beta: float, dist: JamDistribution) -> float:
    """beta - g(beta)/2; the best-response threshold is its root."""
    return beta - g_ratio(beta, dist) / 2


def br_residuals(betas, dist: JamDistribution) -> np.ndarray:
    """Vectorized residual; entries with a zero denominator come back as nan."""
    b = np.asarray(betas, dtype=float)
    e1, e2 = clipped_moments(dist, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(e1 > 0, b - e2 / (2 * np.where(e1 > 0, e1, 1.0)), np.nan)
