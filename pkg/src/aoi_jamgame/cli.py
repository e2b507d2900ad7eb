"""Command-line front end.

Exit status: 0 success, 1 validation or input error, 2 internal check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import oracle as orc
from .analytics import average_age
from .experiments import emit_results, parse_alphas, sweep_mixture, write_json
from .model import (
    GameError,
    ZeroWait,
    check_feasibility,
    load_distribution,
    load_policy,
    validate_config,
)
from .montecarlo import SCHEMA, simulate, write_stats_json
from .solver import NoBracket, best_response, equilibrium, verify_equilibrium


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _print_json(payload: dict):
    print(json.dumps({"schema": SCHEMA, **payload}, indent=2))


def cmd_equilibrium(args) -> int:
    sol = equilibrium(validate_config(args.a_max, args.a_avg))
    rep = verify_equilibrium(sol)
    if args.json:
        _print_json({**sol.to_dict(), "verification": rep.checks})
    else:
        print(f"beta*      = {sol.beta_star:.10g}")
        print(f"age        = {sol.age.time_average:.10g} (time average)")
        print(f"f_A* atoms = {[(round(x, 12), round(m, 12)) for x, m in sol.dist.atoms]}")
        for name, c in rep.checks.items():
            print(f"  {name:12s} {'ok' if c['passed'] else 'FAIL'}  {c['detail']}")
    return 0 if rep.passed else 2


def cmd_best_response(args) -> int:
    dist = load_distribution(args.dist)
    policy = best_response(dist, tol=args.tol, a_max=args.a_max)
    payload = {
        "beta": policy.beta,
        "age_time_average": average_age(dist, policy).time_average,
        "age_zero_wait": average_age(dist, ZeroWait()).time_average,
    }
    if args.a_max is not None and args.a_avg is not None:
        feas = check_feasibility(dist, validate_config(args.a_max, args.a_avg))
        payload["feasible"] = feas.feasible
        payload["violations"] = feas.violations
    _print_json(payload)
    return 0


def cmd_simulate(args) -> int:
    dist = load_distribution(args.dist)
    if args.policy == "br":
        policy = best_response(dist)
    elif args.policy in ("zero-wait", "zero_wait"):
        policy = ZeroWait()
    else:
        policy = load_policy(args.policy)
    stats = simulate(dist, policy, args.stages, args.seed)
    if args.out:
        write_stats_json(args.out, stats)
    else:
        print(json.dumps(stats.to_dict(), indent=2))
    return 0


def cmd_oracle(args) -> int:
    cfg = validate_config(args.a_max, args.a_avg)
    grids = orc.PROFILES[args.profile](cfg.a_max)
    res = orc.brute_force_attacker(cfg, grids)
    sol = equilibrium(cfg)
    lemma4 = orc.check_lemma4(cfg)
    simplex = [g for g in grids if g.family is orc.Family.SIMPLEX][-1]
    lemma5 = [orc.check_lemma5(cfg, b, simplex)
              for b in sorted({0.0, sol.beta_star / 2, sol.beta_star, cfg.a_max})]
    report = {
        "a_max": cfg.a_max, "a_avg": cfg.a_avg, "profile": args.profile,
        **res.to_dict(),
        "recovered": abs(res.gap) <= 1e-6,
        "lemma4": lemma4.to_dict(),
        "lemma5": [r.to_dict() for r in lemma5],
    }
    ok = report["recovered"] and lemma4.passed and all(r.passed for r in lemma5)
    if args.out:
        write_json(args.out, report)
    else:
        _print_json(report)
    return 0 if ok else 2


def cmd_sweep(args) -> int:
    cfg = validate_config(args.a_max, args.a_avg)
    stages, seed = (args.simulate if args.simulate else (None, None))
    rows = sweep_mixture(cfg, parse_alphas(args.alphas), stages, seed)
    fmt = "json" if str(args.out).endswith(".json") else "csv"
    emit_results(rows, fmt, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aoi-jamgame", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("equilibrium", help="closed-form stationary equilibrium")
    s.add_argument("--a-max", type=float, required=True)
    s.add_argument("--a-avg", type=float, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_equilibrium)

    s = sub.add_parser("best-response", help="water-filling threshold for a jamming law")
    s.add_argument("--dist", required=True, help="distribution JSON file")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--a-max", type=float, default=None)
    s.add_argument("--a-avg", type=float, default=None)
    s.set_defaults(func=cmd_best_response)

    s = sub.add_parser("simulate", help="Monte Carlo age estimate")
    s.add_argument("--dist", required=True)
    s.add_argument("--policy", required=True, help='policy JSON file, "br" or "zero-wait"')
    s.add_argument("--stages", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("oracle", help="brute-force attacker search and lemma checks")
    s.add_argument("--a-max", type=float, required=True)
    s.add_argument("--a-avg", type=float, required=True)
    s.add_argument("--profile", choices=sorted(orc.PROFILES), default="ci")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="mixture sweep between deterministic and equilibrium jammers")
    s.add_argument("--a-max", type=float, default=4.0)
    s.add_argument("--a-avg", type=float, default=1.0)
    s.add_argument("--alphas", default="0:0.1:1")
    s.add_argument("--simulate", nargs=2, type=int, metavar=("STAGES", "SEED"))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GameError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, NoBracket) as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
