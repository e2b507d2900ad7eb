"""Seeded sample-path simulation of the stage dynamics.

Each stage draws A_n by inverse-CDF, waits D_n = u(A_n) and contributes the
exact sawtooth area L_n^2 / 2 with L_n = A_n + D_n; there is no time grid.

Uniforms come in fixed-size blocks, block k drawn from a Philox stream keyed
by (seed, k). Stage n therefore depends only on (seed, n), so any split of the
blocks across workers gives bit-identical results once partial sums are merged
in block order.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .model import JamDistribution, SamplingPolicy, StagePath

BLOCK = 1 << 16
TRACE_CAP = 100_000
SCHEMA = "aoi-jamgame/1"
THREADS_ENV = "AOI_JAMGAME_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def block_generator(seed: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniform draws for stages [start, stop), zero-based."""
    out = []
    k0, k1 = start // BLOCK, (stop - 1) // BLOCK
    for k in range(k0, k1 + 1):
        u = block_generator(seed, k).random(BLOCK)
        lo = max(start - k * BLOCK, 0)
        hi = min(stop - k * BLOCK, BLOCK)
        out.append(u[lo:hi])
    return np.concatenate(out)


def sample_jam(dist: JamDistribution, rng: np.random.Generator) -> float:
    return float(dist.quantile(rng.random()))


def sample_jams(dist: JamDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    return dist.quantile(rng.random(size))


@dataclass(frozen=True)
class AgeStats:
    stages: int
    total_time: float
    total_area: float
    min_interval: float
    max_interval: float

    @property
    def age_estimate(self) -> float:
        return self.total_area / self.total_time if self.total_time > 0 else math.nan

    def merge(self, other: "AgeStats") -> "AgeStats":
        return AgeStats(
            self.stages + other.stages,
            self.total_time + other.total_time,
            self.total_area + other.total_area,
            min(self.min_interval, other.min_interval),
            max(self.max_interval, other.max_interval),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["age_estimate"] = self.age_estimate
        return {"schema": SCHEMA, **d}


def _stage_arrays(dist, policy, seed, start, stop):
    a = dist.quantile(_uniforms(seed, start, stop))
    d = policy.delay(a)
    return a, d, a + d


def _block_stats(dist, policy, seed, k, stages) -> AgeStats:
    start, stop = k * BLOCK, min((k + 1) * BLOCK, stages)
    _, _, L = _stage_arrays(dist, policy, seed, start, stop)
    return AgeStats(stop - start, float(L.sum()), float((L * L).sum() / 2),
                    float(L.min()), float(L.max()))


def simulate(dist: JamDistribution, policy: SamplingPolicy, stages: int, seed: int,
             workers: int | None = None) -> AgeStats:
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    nblocks = -(-stages // BLOCK)
    workers = worker_count() if workers is None else workers
    job = lambda k: _block_stats(dist, policy, seed, k, stages)
    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(nblocks)))
    else:
        parts = [job(k) for k in range(nblocks)]
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    return total


def trace(dist: JamDistribution, policy: SamplingPolicy, stages: int, seed: int,
          cap: int = TRACE_CAP) -> list[StagePath]:
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    if stages > cap:
        raise ValueError(f"trace of {stages} stages exceeds cap {cap}")
    a, d, L = _stage_arrays(dist, policy, seed, 0, stages)
    epochs = np.cumsum(L)
    return [StagePath(n + 1, float(a[n]), float(d[n]), float(L[n]), float(epochs[n]))
            for n in range(stages)]


TRACE_COLUMNS = ("stage", "jam", "delay", "interval", "sample_epoch")


def write_trace_csv(path, records: list[StagePath]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for r in records:
            w.writerow([r.stage] + [repr(getattr(r, c)) for c in TRACE_COLUMNS[1:]])


def write_stats_json(path, stats: AgeStats):
    with open(path, "w") as fh:
        json.dump(stats.to_dict(), fh, indent=2)
