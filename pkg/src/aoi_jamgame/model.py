"""Game configuration, jamming-time distributions and sampling policies.

A jamming-time law is a mixed distribution on [0, a_max]: point atoms plus a
piecewise-constant density. Moments, CDF and quantile are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

MASS_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
ATOM_MERGE_TOL = 1e-12


class GameError(ValueError):
    """Base class for validation errors raised by this package."""


class InfeasibleMean(GameError):
    pass


class DegenerateBudget(GameError):
    pass


class InvalidDistribution(GameError):
    pass


class InvalidPolicy(GameError):
    pass


class ZeroStageLength(GameError):
    """Expected stage length E[A + u(A)] is zero, so the age ratio is 0/0."""


@dataclass(frozen=True)
class GameConfig:
    a_max: float
    a_avg: float

    def __post_init__(self):
        for name in ("a_max", "a_avg"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise GameError(f"{name} must be finite, got {v}")
        if self.a_max <= 0:
            raise GameError(f"a_max must be positive, got {self.a_max}")
        if self.a_avg <= 0:
            raise DegenerateBudget(f"a_avg must be positive, got {self.a_avg}")
        if self.a_avg > self.a_max:
            raise InfeasibleMean(f"a_avg={self.a_avg} exceeds a_max={self.a_max}")

    @property
    def ratio(self) -> float:
        return self.a_avg / self.a_max


def validate_config(a_max: float, a_avg: float) -> GameConfig:
    return GameConfig(float(a_max), float(a_avg))


@dataclass(frozen=True)
class JamDistribution:
    """Mixed law: ``atoms`` are (location, mass), ``pieces`` are (lo, hi, density).

    Construction coalesces near-coincident atoms, drops zero-mass terms and
    renormalizes total mass within 1e-9 of one.
    """

    atoms: tuple = ()
    pieces: tuple = ()

    def __post_init__(self):
        atoms = [(float(x), float(m)) for x, m in self.atoms]
        pieces = [(float(lo), float(hi), float(d)) for lo, hi, d in self.pieces]

        for x, m in atoms:
            if not (math.isfinite(x) and math.isfinite(m)):
                raise InvalidDistribution(f"non-finite atom ({x}, {m})")
            if x < 0:
                raise InvalidDistribution(f"atom location {x} is negative")
            if m < 0:
                raise InvalidDistribution(f"atom mass {m} is negative")
        for lo, hi, d in pieces:
            if not all(math.isfinite(v) for v in (lo, hi, d)):
                raise InvalidDistribution(f"non-finite piece ({lo}, {hi}, {d})")
            if not lo < hi:
                raise InvalidDistribution(f"piece needs lo < hi, got [{lo}, {hi}]")
            if lo < 0:
                raise InvalidDistribution(f"piece [{lo}, {hi}] extends below 0")
            if d < 0:
                raise InvalidDistribution(f"piece density {d} is negative")

        atoms = sorted((x, m) for x, m in atoms if m > 0)
        merged: list[list[float]] = []
        for x, m in atoms:
            if merged and x - merged[-1][0] <= ATOM_MERGE_TOL:
                merged[-1][1] += m
            else:
                merged.append([x, m])

        pieces = sorted(p for p in pieces if p[2] > 0)
        for (_, hi0, _), (lo1, _, _) in zip(pieces, pieces[1:]):
            if lo1 < hi0:
                raise InvalidDistribution("pieces overlap")

        total = sum(m for _, m in merged) + sum(d * (hi - lo) for lo, hi, d in pieces)
        if abs(total - 1.0) > RENORMALIZE_TOL:
            raise InvalidDistribution(f"total probability {total} is not 1")
        if total != 1.0:
            merged = [[x, m / total] for x, m in merged]
            pieces = [(lo, hi, d / total) for lo, hi, d in pieces]

        object.__setattr__(self, "atoms", tuple((x, m) for x, m in merged))
        object.__setattr__(self, "pieces", tuple(pieces))

    @property
    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + sum(d * (hi - lo) for lo, hi, d in self.pieces)

    @property
    def support_min(self) -> float:
        return min([x for x, _ in self.atoms] + [lo for lo, _, _ in self.pieces])

    @property
    def support_max(self) -> float:
        return max([x for x, _ in self.atoms] + [hi for _, hi, _ in self.pieces])

    @cached_property
    def _table(self):
        # Knots x_0 < ... < x_K with right-continuous CDF F(x_k), atom jump at
        # each knot and the constant density on (x_k, x_{k+1}).
        xs = sorted({x for x, _ in self.atoms}
                    | {lo for lo, _, _ in self.pieces}
                    | {hi for _, hi, _ in self.pieces})
        xs = np.array(xs, dtype=float)
        jump = np.zeros(len(xs))
        for x, m in self.atoms:
            jump[np.searchsorted(xs, x)] += m
        dens = np.zeros(len(xs))
        for lo, hi, d in self.pieces:
            i, j = np.searchsorted(xs, lo), np.searchsorted(xs, hi)
            dens[i:j] += d
        cum = np.empty(len(xs))
        acc = 0.0
        for k in range(len(xs)):
            if k > 0:
                acc += dens[k - 1] * (xs[k] - xs[k - 1])
            acc += jump[k]
            cum[k] = acc
        cum = np.minimum(cum, 1.0)
        cum[-1] = 1.0
        return xs, jump, dens, cum

    def cdf(self, a):
        xs, jump, dens, cum = self._table
        a = np.asarray(a, dtype=float)
        k = np.searchsorted(xs, a, side="right") - 1
        kc = np.clip(k, 0, len(xs) - 1)
        val = cum[kc] + dens[kc] * (a - xs[kc])
        val = np.where(k < 0, 0.0, np.minimum(val, 1.0))
        return val if val.ndim else float(val)

    def quantile(self, p):
        """Smallest a with cdf(a) >= p."""
        xs, jump, dens, cum = self._table
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
            raise ValueError("probability must lie in [0, 1]")
        k = np.minimum(np.searchsorted(cum, p, side="left"), len(xs) - 1)
        left = cum[k] - jump[k]  # F(x_k-)
        prev = np.maximum(k - 1, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = xs[prev] + (p - cum[prev]) / dens[prev]
        on_slope = (k > 0) & (p <= left) & (dens[prev] > 0)
        out = np.where(on_slope, np.minimum(inside, xs[k]), xs[k])
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        return {"atoms": [list(a) for a in self.atoms],
                "pieces": [list(p) for p in self.pieces]}

    @classmethod
    def from_dict(cls, data: dict) -> "JamDistribution":
        try:
            if "dist" in data and "atoms" not in data and "pieces" not in data:
                data = data["dist"]
            atoms = [tuple(a) for a in data.get("atoms", [])]
            pieces = [tuple(p) for p in data.get("pieces", [])]
            if any(len(a) != 2 for a in atoms) or any(len(p) != 3 for p in pieces):
                raise InvalidDistribution("atoms need 2 entries and pieces need 3")
        except (TypeError, AttributeError) as exc:
            raise InvalidDistribution(f"malformed distribution: {exc}") from exc
        return cls(tuple(atoms), tuple(pieces))


def point_mass(x: float) -> JamDistribution:
    return JamDistribution(((x, 1.0),))


def uniform(lo: float, hi: float) -> JamDistribution:
    return JamDistribution(pieces=((lo, hi, 1.0 / (hi - lo)),))


def mean(dist: JamDistribution) -> float:
    return (sum(x * m for x, m in dist.atoms)
            + sum(d * (hi * hi - lo * lo) / 2 for lo, hi, d in dist.pieces))


def second_moment(dist: JamDistribution) -> float:
    return (sum(x * x * m for x, m in dist.atoms)
            + sum(d * (hi ** 3 - lo ** 3) / 3 for lo, hi, d in dist.pieces))


def cdf(dist: JamDistribution, a):
    return dist.cdf(a)


def quantile(dist: JamDistribution, p):
    return dist.quantile(p)


@dataclass(frozen=True)
class FeasibilityReport:
    mean: float
    total_mass: float
    support_min: float
    support_max: float
    violations: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations


def check_feasibility(dist: JamDistribution, cfg: GameConfig) -> FeasibilityReport:
    mu = mean(dist)
    total = dist.total_mass
    lo, hi = dist.support_min, dist.support_max
    violations = []
    if mu > cfg.a_avg + MASS_TOL:
        violations.append(f"mean {mu:.12g} exceeds a_avg {cfg.a_avg:.12g}")
    if lo < 0 or hi > cfg.a_max:
        violations.append(f"support [{lo:.12g}, {hi:.12g}] leaves [0, {cfg.a_max:.12g}]")
    if abs(total - 1.0) > MASS_TOL:
        violations.append(f"total mass {total:.15g} differs from 1")
    return FeasibilityReport(mu, total, lo, hi, violations)


def mix(components: Iterable[tuple[JamDistribution, float]]) -> JamDistribution:
    components = list(components)
    weights = [float(w) for _, w in components]
    if any(w < 0 for w in weights):
        raise InvalidDistribution("mixture weights must be non-negative")
    if abs(sum(weights) - 1.0) > MASS_TOL:
        raise InvalidDistribution(f"mixture weights sum to {sum(weights)}, not 1")
    atoms, pieces = [], []
    for dist, w in components:
        if w == 0:
            continue
        atoms += [(x, w * m) for x, m in dist.atoms]
        pieces += [(lo, hi, w * d) for lo, hi, d in dist.pieces]
    return JamDistribution(tuple(atoms), _merge_pieces(pieces))


def _merge_pieces(pieces):
    """Overlay weighted pieces into disjoint pieces with summed density."""
    if not pieces:
        return ()
    edges = sorted({lo for lo, _, _ in pieces} | {hi for _, hi, _ in pieces})
    out = []
    for a, b in zip(edges, edges[1:]):
        d = sum(dd for lo, hi, dd in pieces if lo <= a and b <= hi)
        if d > 0:
            out.append((a, b, d))
    return tuple(out)


@dataclass(frozen=True)
class Threshold:
    """Water-filling rule u(a) = (beta - a)^+."""

    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise InvalidPolicy(f"threshold must be finite and >= 0, got {self.beta}")

    def delay(self, a):
        return np.maximum(self.beta - np.asarray(a, dtype=float), 0.0)


@dataclass(frozen=True)
class ZeroWait:
    def delay(self, a):
        return np.zeros_like(np.asarray(a, dtype=float))


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear delay through ``knots`` (a, delay), held flat outside."""

    knots: tuple

    def __post_init__(self):
        knots = tuple((float(a), float(d)) for a, d in self.knots)
        if not knots:
            raise InvalidPolicy("tabulated policy needs at least one knot")
        xs = [a for a, _ in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidPolicy("knot locations must be strictly increasing")
        if any(d < 0 or not math.isfinite(d) for _, d in knots):
            raise InvalidPolicy("delays must be finite and non-negative")
        object.__setattr__(self, "knots", knots)

    def delay(self, a):
        xs = [k[0] for k in self.knots]
        ds = [k[1] for k in self.knots]
        return np.interp(np.asarray(a, dtype=float), xs, ds)


SamplingPolicy = Union[Threshold, ZeroWait, Tabulated]


def policy_to_dict(policy: SamplingPolicy) -> dict:
    if isinstance(policy, Threshold):
        return {"kind": "threshold", "beta": policy.beta}
    if isinstance(policy, ZeroWait):
        return {"kind": "zero_wait"}
    if isinstance(policy, Tabulated):
        return {"kind": "tabulated", "knots": [list(k) for k in policy.knots]}
    raise InvalidPolicy(f"unknown policy {policy!r}")


def policy_from_dict(data: dict) -> SamplingPolicy:
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "threshold":
        return Threshold(float(data["beta"]))
    if kind in ("zero_wait", "zero-wait"):
        return ZeroWait()
    if kind == "tabulated":
        return Tabulated(tuple(tuple(k) for k in data["knots"]))
    raise InvalidPolicy(f"unknown policy kind {kind!r}")


def load_distribution(path) -> JamDistribution:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDistribution(f"{path}: not valid JSON ({exc})") from exc
    return JamDistribution.from_dict(data)


def load_policy(path) -> SamplingPolicy:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidPolicy(f"{path}: not valid JSON ({exc})") from exc
    return policy_from_dict(data)


@dataclass(frozen=True)
class StagePath:
    stage: int
    jam: float
    delay: float
    interval: float
    sample_epoch: float


def equilibrium_distribution(cfg: GameConfig) -> JamDistribution:
    """Two-point law with mass a_avg/a_max at a_max and the rest at 0."""
    q = cfg.a_avg / cfg.a_max
    return JamDistribution(((0.0, 1.0 - q), (cfg.a_max, q)))


def atoms_array(dist: JamDistribution) -> tuple[np.ndarray, np.ndarray]:
    if not dist.atoms:
        return np.zeros(0), np.zeros(0)
    xs, ms = zip(*dist.atoms)
    return np.array(xs), np.array(ms)


def from_atoms(locations: Sequence[float], masses: Sequence[float]) -> JamDistribution:
    return JamDistribution(tuple(zip(locations, masses)))
