"""Best-response water-filling thresholds and the closed-form equilibrium."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import AgeConvention, AgeValue, br_residual, br_residuals
from .model import (
    GameConfig,
    JamDistribution,
    Threshold,
    ZeroStageLength,
    check_feasibility,
    equilibrium_distribution,
    mean,
)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MAX_ITER = 200
SCAN_POINTS = 1000


class NoBracket(AssertionError):
    """Residual has the same sign at both ends of [0, a_max]."""


def residual_sign_changes(dist: JamDistribution, upper: float, points: int = SCAN_POINTS) -> int:
    """Count sign changes of the best-response residual on a uniform grid."""
    grid = np.linspace(0.0, upper, points + 1)
    r = br_residuals(grid, dist)
    s = np.sign(r[np.isfinite(r) & (r != 0)])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def best_response_threshold(dist: JamDistribution, tol: float = DEFAULT_TOL,
                            a_max: float | None = None, diagnose: bool = True) -> float:
    upper = dist.support_max if a_max is None else float(a_max)
    if mean(dist) <= 0:
        raise ZeroStageLength("no positive jamming time, so the best response is degenerate")
    lo, hi = 0.0, upper
    r_lo, r_hi = br_residual(lo, dist), br_residual(hi, dist)
    if r_lo == 0:
        return lo
    if not (r_lo < 0 < r_hi):
        raise NoBracket(f"residual signs {r_lo:.3g}, {r_hi:.3g} on [0, {upper:.6g}]")
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        r = br_residual(mid, dist)
        if abs(r) <= tol and hi - lo <= tol:
            break
        if r < 0:
            lo = mid
        elif r > 0:
            hi = mid
        else:
            break
    if diagnose:
        n = residual_sign_changes(dist, upper)
        if n > 1:
            log.warning("best-response residual changes sign %d times; returning bracketed root", n)
    return mid


def best_response(dist: JamDistribution, tol: float = DEFAULT_TOL,
                  a_max: float | None = None) -> Threshold:
    return Threshold(best_response_threshold(dist, tol, a_max))


def beta_star_closed_form(cfg: GameConfig) -> float:
    ra, rm = math.sqrt(cfg.a_avg), math.sqrt(cfg.a_max)
    return ra / (rm + ra) * cfg.a_max


def beta_star_quadratic(cfg: GameConfig) -> float:
    """Positive root of (1 - q) b^2 + 2 a_avg b - a_avg a_max = 0, q = a_avg / a_max.

    Written as 2c / (-b - sqrt(D)) so the linear case q = 1 needs no branch.
    """
    a = 1.0 - cfg.a_avg / cfg.a_max
    b = 2.0 * cfg.a_avg
    c = -cfg.a_avg * cfg.a_max
    return -2.0 * c / (b + math.sqrt(b * b - 4.0 * a * c))


@dataclass(frozen=True)
class Residuals:
    fixed_point: float
    quadratic: float
    mean_slack: float


@dataclass(frozen=True)
class EquilibriumSolution:
    cfg: GameConfig
    dist: JamDistribution
    beta_star: float
    policy: Threshold
    age: AgeValue
    residuals: Residuals

    def to_dict(self) -> dict:
        return {
            "a_max": self.cfg.a_max,
            "a_avg": self.cfg.a_avg,
            "beta_star": self.beta_star,
            "age_time_average": self.age.time_average,
            "age_stage_ratio": self.age.stage_ratio,
            "dist": self.dist.to_dict(),
            "policy": {"kind": "threshold", "beta": self.policy.beta},
            "residuals": {
                "fixed_point": self.residuals.fixed_point,
                "quadratic": self.residuals.quadratic,
                "mean_slack": self.residuals.mean_slack,
            },
        }


def equilibrium(cfg: GameConfig) -> EquilibriumSolution:
    dist = equilibrium_distribution(cfg)
    beta = beta_star_closed_form(cfg)
    residuals = Residuals(
        fixed_point=br_residual(beta, dist),
        quadratic=beta - beta_star_quadratic(cfg),
        mean_slack=cfg.a_avg - mean(dist),
    )
    # At the fixed point the time-average age under Threshold(beta) is beta itself.
    return EquilibriumSolution(cfg, dist, beta, Threshold(beta),
                               AgeValue(beta, AgeConvention.TIME_AVERAGE), residuals)


@dataclass
class VerificationReport:
    checks: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail: str):
        self.checks[name] = {"passed": bool(passed), "detail": detail}

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c["passed"]]


def verify_equilibrium(sol: EquilibriumSolution, tol: float = 1e-9) -> VerificationReport:
    cfg, dist, beta = sol.cfg, sol.dist, sol.beta_star
    rep = VerificationReport()

    feas = check_feasibility(dist, cfg)
    mu = feas.mean
    ok = feas.feasible and abs(mu - cfg.a_avg) <= 1e-12
    rep.add("feasible", ok, f"mean={mu:.15g} a_avg={cfg.a_avg:.15g} violations={feas.violations}")

    try:
        r = br_residual(beta, dist)
    except ZeroStageLength as exc:
        rep.add("fixed_point", False, str(exc))
    else:
        rep.add("fixed_point", abs(r) <= tol, f"residual={r:.6g}")

    rep.add("interior", 0 < beta < cfg.a_max, f"beta={beta:.15g} a_max={cfg.a_max:.15g}")

    q = beta_star_quadratic(cfg)
    rep.add("quadratic", abs(beta - q) <= tol, f"beta={beta:.15g} quadratic_root={q:.15g}")

    try:
        br = best_response_threshold(dist, a_max=cfg.a_max)
    except (ZeroStageLength, NoBracket) as exc:
        rep.add("bisection", False, str(exc))
    else:
        rep.add("bisection", abs(br - beta) <= tol, f"bisection={br:.15g} beta={beta:.15g}")
    return rep
