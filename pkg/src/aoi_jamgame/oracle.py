"""Brute-force checks of the attacker side on discretized feasible sets.

Candidates are finite-support laws on a uniform support grid over [0, a_max].
Each batch is a dense mass matrix ``W`` (one row per candidate) against the
grid ``x``; best responses for a whole batch are found by one vectorized
bisection on the sign of 2 b E[max(b, A)] - E[max(b, A)^2], which has the same
sign as the best-response residual but needs no division.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .analytics import AgeConvention, AgeValue, g_ratio
from .model import GameConfig, JamDistribution, equilibrium_distribution, from_atoms
from .solver import beta_star_closed_form, br_residual, equilibrium

BATCH_ROWS = 1 << 17
BISECT_TOL = 1e-13
TIE_TOL = 1e-12
MAX_LISTED = 25


class Family(str, enum.Enum):
    TWO_POINT = "two_point"
    THREE_POINT = "three_point"
    SIMPLEX = "simplex"


@dataclass(frozen=True)
class SearchGrid:
    support_step: float
    mass_step: float
    family: Family = Family.SIMPLEX

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (self.support_step > 0 and math.isfinite(self.support_step)):
            raise ValueError(f"support_step must be positive, got {self.support_step}")
        if not 0 < self.mass_step <= 1:
            raise ValueError(f"mass_step must lie in (0, 1], got {self.mass_step}")
        n = 1 / self.mass_step
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"1/mass_step must be an integer, got {n}")

    @property
    def mass_units(self) -> int:
        return int(round(1 / self.mass_step))

    def support(self, a_max: float) -> np.ndarray:
        n = a_max / self.support_step
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"support_step {self.support_step} does not divide a_max {a_max}")
        n = int(round(n))
        x = np.arange(n + 1) * self.support_step
        x[-1] = a_max
        return x

    def to_dict(self) -> dict:
        return {"support_step": self.support_step, "mass_step": self.mass_step,
                "family": self.family.value}


PROFILES = {
    # TwoPoint already contains the equilibrium law; the simplex grid is the
    # structural guard and is kept at 5 support points to stay enumerable.
    "ci": lambda a_max: [SearchGrid(a_max / 16, 1 / 64, Family.TWO_POINT),
                         SearchGrid(a_max / 4, 1 / 64, Family.SIMPLEX)],
    "deep": lambda a_max: [SearchGrid(a_max / 64, 1 / 256, Family.TWO_POINT),
                           SearchGrid(a_max / 16, 1 / 64, Family.THREE_POINT),
                           SearchGrid(a_max / 4, 1 / 128, Family.SIMPLEX)],
}


# --- candidate enumeration -------------------------------------------------

def _compositions(total: int, parts: int, batch: int) -> Iterator[np.ndarray]:
    """Non-negative integer vectors of length ``parts`` summing to ``total``,
    in lexicographic stars-and-bars order, yielded in row batches."""
    if parts == 1:
        yield np.array([[total]])
        return
    combos = itertools.combinations(range(total + parts - 1), parts - 1)
    while True:
        chunk = list(itertools.islice(combos, batch))
        if not chunk:
            return
        bars = np.array(chunk, dtype=np.int64)
        edges = np.hstack([np.full((len(bars), 1), -1), bars,
                           np.full((len(bars), 1), total + parts - 1)])
        yield np.diff(edges, axis=1) - 1


def _simplex_batches(x, units, a_avg, batch):
    for counts in _compositions(units, len(x), batch):
        w = counts / units
        yield w[w @ x <= a_avg + 1e-12]


def _two_point_batches(x, a_avg):
    k = len(x)
    rows = []
    for i in range(k):
        if x[i] <= a_avg:
            w = np.zeros(k)
            w[i] = 1.0
            rows.append(w)
    for i, j in itertools.combinations(range(k), 2):
        lo, hi = x[i], x[j]
        if lo < a_avg < hi:
            q = (a_avg - lo) / (hi - lo)
            w = np.zeros(k)
            w[i], w[j] = 1.0 - q, q
            rows.append(w)
    yield np.array(rows)


def _three_point_batches(x, units, a_avg, batch):
    k = len(x)
    counts = np.array([c for c in itertools.product(range(1, units), repeat=2)
                       if c[0] + c[1] < units])
    masses = np.column_stack([counts, units - counts.sum(axis=1)]) / units
    rows = []
    nrows = 0
    for idx in itertools.combinations(range(k), 3):
        w = np.zeros((len(masses), k))
        w[:, idx] = masses
        w = w[w @ x <= a_avg + 1e-12]
        rows.append(w)
        nrows += len(w)
        if nrows >= batch:
            yield np.vstack(rows)
            rows, nrows = [], 0
    if rows:
        yield np.vstack(rows)


def candidate_batches(cfg: GameConfig, grid: SearchGrid, batch: int = BATCH_ROWS):
    """Yield (x, W) with W rows the feasible candidates in canonical order."""
    x = grid.support(cfg.a_max)
    if grid.family is Family.SIMPLEX:
        gen = _simplex_batches(x, grid.mass_units, cfg.a_avg, batch)
    elif grid.family is Family.TWO_POINT:
        gen = _two_point_batches(x, cfg.a_avg)
    else:
        gen = _three_point_batches(x, grid.mass_units, cfg.a_avg, batch)
    for w in gen:
        if len(w):
            yield x, w


# --- vectorized evaluation -------------------------------------------------

def batch_clipped(x: np.ndarray, w: np.ndarray, beta: np.ndarray):
    c = np.maximum(np.asarray(beta)[..., None], x)
    return (w * c).sum(axis=-1), (w * c * c).sum(axis=-1)


def batch_best_response(x: np.ndarray, w: np.ndarray, tol: float = BISECT_TOL):
    """Best-response thresholds and time-average ages for every row of ``w``."""
    n = len(w)
    lo = np.zeros(n)
    hi = np.where(w > 0, x, 0.0).max(axis=1)
    iters = int(math.ceil(math.log2(max(x[-1], tol) / tol))) + 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        e1, e2 = batch_clipped(x, w, mid)
        neg = 2 * mid * e1 < e2  # residual < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    beta = 0.5 * (lo + hi)
    e1, e2 = batch_clipped(x, w, beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        age = np.where(e1 > 0, e2 / (2 * np.where(e1 > 0, e1, 1.0)), 0.0)
    return beta, age


def _row_dist(x, row) -> JamDistribution:
    keep = row > 0
    return from_atoms(x[keep], row[keep])


def _pick(age, m2):
    """Index of the best row: max age, ties toward larger E[A^2], then first."""
    top = age.max()
    tied = np.flatnonzero(age >= top - TIE_TOL)
    m2t = m2[tied]
    return int(tied[np.flatnonzero(m2t >= m2t.max() - TIE_TOL)[0]])


# --- reports ---------------------------------------------------------------

@dataclass
class OracleResult:
    dist: JamDistribution
    age: AgeValue
    beta: float
    candidates: int
    grids: list
    equilibrium_age: float

    @property
    def gap(self) -> float:
        return self.equilibrium_age - self.age.time_average

    def to_dict(self) -> dict:
        return {
            "candidates": self.candidates,
            "grids": [g.to_dict() for g in self.grids],
            "best": {"dist": self.dist.to_dict(), "beta": self.beta,
                     "age_time_average": self.age.time_average},
            "equilibrium_age": self.equilibrium_age,
            "gap": self.gap,
        }


def brute_force_attacker(cfg: GameConfig, grids) -> OracleResult:
    """Maximize the best-response age over every feasible candidate on ``grids``."""
    if isinstance(grids, SearchGrid):
        grids = [grids]
    best = None  # (age, m2, dist, beta)
    count = 0
    for grid in grids:
        for x, w in candidate_batches(cfg, grid):
            beta, age = batch_best_response(x, w)
            m2 = w @ (x * x)
            i = _pick(age, m2)
            count += len(w)
            if (best is None or age[i] > best[0] + TIE_TOL
                    or (age[i] >= best[0] - TIE_TOL and m2[i] > best[1] + TIE_TOL)):
                best = (float(age[i]), float(m2[i]), _row_dist(x, w[i]), float(beta[i]))
    if best is None:
        raise ValueError("no feasible candidate on the search grid")
    age, _, dist, beta = best
    return OracleResult(dist, AgeValue(age, AgeConvention.TIME_AVERAGE), beta, count,
                        list(grids), beta_star_closed_form(cfg))


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details,
                "failures": self.failures[:MAX_LISTED]}


def check_lemma4(cfg: GameConfig, beta_grid=None, points: int = 100,
                 fd_step: float = 1e-5, slack: float = 1e-6) -> CheckReport:
    """Residual positive above the equilibrium threshold with slope above 1/2."""
    sol = equilibrium(cfg)
    bstar = sol.beta_star
    if beta_grid is None:
        beta_grid = np.linspace(bstar, cfg.a_max, points + 1)[1:]
    beta_grid = np.sort(np.asarray(beta_grid, dtype=float))
    failures = []
    res = [br_residual(b, sol.dist) for b in beta_grid]
    for b, r in zip(beta_grid, res):
        if b > bstar and not r > 0:
            failures.append(f"residual {r:.3g} <= 0 at beta={b:.12g}")
        if b <= bstar:
            failures.append(f"beta={b:.12g} not above beta*={bstar:.12g}")
    chord = []
    for (b0, r0), (b1, r1) in zip(zip(beta_grid, res), zip(beta_grid[1:], res[1:])):
        s = (r1 - r0) / (b1 - b0)
        chord.append(s)
        if s <= 0.5 - slack:
            failures.append(f"chord slope {s:.9g} on [{b0:.9g}, {b1:.9g}]")
    local = []
    for b in beta_grid:
        if bstar + fd_step < b < cfg.a_max - fd_step:
            s = (br_residual(b + fd_step, sol.dist) - br_residual(b - fd_step, sol.dist)) / (2 * fd_step)
            local.append(s)
            if s <= 0.5 - slack:
                failures.append(f"derivative {s:.9g} at beta={b:.9g}")
    details = {
        "beta_star": bstar,
        "residual_at_beta_star": br_residual(bstar, sol.dist),
        "grid_points": len(beta_grid),
        "min_residual": float(min(res)) if res else None,
        "min_chord_slope": float(min(chord)) if chord else None,
        "min_local_slope": float(min(local)) if local else None,
    }
    return CheckReport("lemma4", not failures, details, failures)


def check_lemma5(cfg: GameConfig, beta: float, grid: SearchGrid,
                 slack: float = 1e-9) -> CheckReport:
    """For fixed beta the equilibrium law maximizes the g-ratio over the grid."""
    if not 0 <= beta <= cfg.a_max:
        raise ValueError(f"beta must lie in [0, a_max], got {beta}")
    g_star = g_ratio(beta, equilibrium_distribution(cfg))
    best_g, best_row, count, skipped = -math.inf, None, 0, 0
    failures = []
    for x, w in candidate_batches(cfg, grid):
        e1, e2 = batch_clipped(x, w, np.full(len(w), float(beta)))
        ok = e1 > 0
        skipped += int((~ok).sum())
        g = np.full(len(w), -math.inf)
        g[ok] = e2[ok] / e1[ok]
        count += int(ok.sum())
        i = int(np.argmax(g))
        if g[i] > best_g:
            best_g, best_row = float(g[i]), _row_dist(x, w[i])
        for j in np.flatnonzero(g > g_star + slack)[:MAX_LISTED]:
            failures.append(f"g={g[j]:.12g} > g*={g_star:.12g} for {_row_dist(x, w[j]).atoms}")
    details = {"beta": beta, "g_star": g_star, "max_g": best_g,
               "argmax": best_row.to_dict() if best_row else None,
               "candidates": count, "skipped_zero_denominator": skipped,
               "grid": grid.to_dict()}
    return CheckReport("lemma5", not failures, details, failures)


def total_variation(a: JamDistribution, b: JamDistribution) -> float:
    """TV distance between two purely atomic laws (atoms matched to 1e-12)."""
    locs = sorted({x for x, _ in a.atoms} | {x for x, _ in b.atoms})
    merged = []
    for x in locs:
        if not merged or x - merged[-1] > 1e-12:
            merged.append(x)

    def mass(d, x):
        return sum(m for y, m in d.atoms if abs(y - x) <= 1e-12)

    return 0.5 * sum(abs(mass(a, x) - mass(b, x)) for x in merged)


def uniqueness_probe(cfg: GameConfig, grid: SearchGrid, tol: float) -> CheckReport:
    """List grid laws whose best-response age is within ``tol`` of equilibrium."""
    f_star = equilibrium_distribution(cfg)
    eq_age = beta_star_closed_form(cfg)
    near = []
    count = 0
    for x, w in candidate_batches(cfg, grid):
        _, age = batch_best_response(x, w)
        count += len(w)
        for j in np.flatnonzero(age >= eq_age - tol):
            d = _row_dist(x, w[j])
            near.append((float(age[j]), total_variation(d, f_star), d))
    near.sort(key=lambda t: (-t[0], t[1]))
    far = [t for t in near if t[1] > grid.mass_step + 1e-12]
    details = {
        "equilibrium_age": eq_age,
        "candidates": count,
        "near_optimal": len(near),
        "non_unique": len(near) > 1,
        "max_tv": max((t[1] for t in near), default=0.0),
        "listed": [{"age": a, "tv": tv, "dist": d.to_dict()} for a, tv, d in near[:MAX_LISTED]],
    }
    failures = [f"age {a:.12g} at TV {tv:.4g} from equilibrium: {d.atoms}" for a, tv, d in far]
    return CheckReport("uniqueness", not far, details, failures)
