"""Mixture sweep between the deterministic and equilibrium jammers, plus output."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytics import average_age
from .model import GameConfig, ZeroWait, equilibrium_distribution, mix, point_mass
from .montecarlo import SCHEMA, simulate, worker_count
from .solver import best_response

SWEEP_COLUMNS = ("alpha", "age_equilibrium_policy", "age_zero_wait", "beta_br", "age_simulated")


@dataclass(frozen=True)
class MixtureSweepRow:
    alpha: float
    age_equilibrium_policy: float
    age_zero_wait: float
    beta_br: float
    age_simulated: Optional[float] = None


def parse_alphas(text: str) -> list[float]:
    """``start:step:stop`` (endpoints inclusive within 1e-9) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"alpha range must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("alpha step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9))
        alphas = [start + i * step for i in range(n + 1)]
        if abs(alphas[-1] - stop) <= 1e-9:
            alphas[-1] = stop
        alphas = [round(a, 12) for a in alphas]
    else:
        alphas = [float(p) for p in text.split(",") if p.strip()]
    if any(not 0 <= a <= 1 for a in alphas):
        raise ValueError("alphas must lie in [0, 1]")
    return sorted(alphas)


def mixture(cfg: GameConfig, alpha: float):
    return mix([(equilibrium_distribution(cfg), alpha), (point_mass(cfg.a_avg), 1.0 - alpha)])


def sweep_row(cfg: GameConfig, alpha: float, sim_stages: int | None = None,
              seed: int | None = None) -> MixtureSweepRow:
    dist = mixture(cfg, alpha)
    policy = best_response(dist, a_max=cfg.a_max)
    sim = None
    if sim_stages:
        sim = simulate(dist, policy, sim_stages, seed or 0, workers=1).age_estimate
    return MixtureSweepRow(alpha, average_age(dist, policy).time_average,
                           average_age(dist, ZeroWait()).time_average, policy.beta, sim)


def sweep_mixture(cfg: GameConfig, alphas, sim_stages: int | None = None,
                  seed: int | None = None) -> list[MixtureSweepRow]:
    alphas = sorted(float(a) for a in alphas)
    if any(not 0 <= a <= 1 for a in alphas):
        raise ValueError("alphas must lie in [0, 1]")
    job = lambda a: sweep_row(cfg, a, sim_stages, seed)
    workers = worker_count()
    if workers > 1 and len(alphas) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, alphas))
    return [job(a) for a in alphas]


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.12g}"


def write_sweep_csv(path, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SWEEP_COLUMNS)
            for r in rows:
                w.writerow([_fmt(getattr(r, c)) for c in SWEEP_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_sweep_csv(path) -> list[MixtureSweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [MixtureSweepRow(*(float(row[c]) if row[c] else None for c in SWEEP_COLUMNS))
                for row in reader]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, MixtureSweepRow):
        return {c: getattr(obj, c) for c in SWEEP_COLUMNS}
    return obj


def write_json(path, payload: dict):
    doc = {"schema": SCHEMA, **_jsonable(payload)}
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_results(rows_or_report, fmt: str, path):
    """Write sweep rows as CSV, or rows / a report dict as JSON."""
    if fmt == "csv":
        write_sweep_csv(path, rows_or_report)
    elif fmt == "json":
        payload = rows_or_report
        if isinstance(payload, list):
            payload = {"rows": payload}
        elif hasattr(payload, "to_dict"):
            payload = payload.to_dict()
        write_json(path, payload)
    else:
        raise ValueError(f"unknown format {fmt!r}")
