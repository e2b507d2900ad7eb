"""Sweep the jammer mixture between delta(a_avg) and the equilibrium law.

    python scripts/mixture_sweep.py --out results/sweep.csv --simulate 200000 1
"""

import argparse

from aoi_jamgame.experiments import parse_alphas, sweep_mixture, write_sweep_csv
from aoi_jamgame.model import validate_config


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--a-max", type=float, default=4.0)
    p.add_argument("--a-avg", type=float, default=1.0)
    p.add_argument("--alphas", default="0:0.05:1")
    p.add_argument("--simulate", nargs=2, type=int, metavar=("STAGES", "SEED"))
    p.add_argument("--out", default="sweep.csv")
    args = p.parse_args()

    cfg = validate_config(args.a_max, args.a_avg)
    stages, seed = args.simulate or (None, None)
    rows = sweep_mixture(cfg, parse_alphas(args.alphas), sim_stages=stages, seed=seed)
    write_sweep_csv(args.out, rows)
    print(f"{'alpha':>6} {'eq policy':>12} {'zero wait':>12} {'beta_br':>12}")
    for r in rows:
        print(f"{r.alpha:6.3f} {r.age_equilibrium_policy:12.6f} {r.age_zero_wait:12.6f} {r.beta_br:12.6f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
