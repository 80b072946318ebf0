"""Command-line harness.

Three command groups: ``solve`` runs one computation on a game file and
prints a JSON report (exact rationals plus decimal renderings), ``experiment``
writes one of the batch CSV tables, and ``gen`` writes a random game file.
Exit codes: 0 success, 2 usage, 3 validation or file errors, 4 guard or
size-limit refusals.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .equilibria import Solver, _strategy_json, inducibility_via_reduction
from .errors import (GameFormatError, GuardError, PreconditionError,
                     TooManyJointSchedulesError)
from .experiments import MODES, ExperimentPlan, run_to_csv
from .game import ssas_check
from .instances import (GeneratorConfig, load_game, load_strategy,
                        random_game, random_ssas_game, save_game)
from .rationals import format_decimal

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_VALIDATION = 3
_EXIT_GUARD = 4

# generator knob defaults per experiment mode; inducibility brackets the
# single-resource many-target setting, overopt the small dense one, and
# scalability the large three-resource one
_EXPERIMENT_DEFAULTS = {
    "inducibility": dict(n=100, schedules=20, l=20, resources=1, trials=20),
    "overopt": dict(n=20, schedules=8, l=6, resources=1, trials=20),
    "scalability": dict(n=100, schedules=50, l=5, resources=3, trials=3),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secgames",
        description="Security-game equilibrium solver and experiment runner")
    top = parser.add_subparsers(dest="command", required=True)

    solve = top.add_parser("solve", help="solve one game file")
    ops = solve.add_subparsers(dest="operation", required=True)

    def game_op(name: str, help_text: str) -> argparse.ArgumentParser:
        p = ops.add_parser(name, help=help_text)
        p.add_argument("game", help="game file (JSON)")
        return p

    game_op("sse", "strong Stackelberg equilibrium")
    game_op("ise", "inducible Stackelberg equilibrium")
    p = game_op("guarantee", "utility guarantee of a given mixed strategy")
    p.add_argument("--strategy", required=True,
                   help="strategy file (JSON assignment->probability map)")
    p = game_op("inducible", "inducibility report")
    mx = p.add_mutually_exclusive_group()
    mx.add_argument("--target", type=int, metavar="K",
                    help="single 1-based target")
    mx.add_argument("--elements", action="store_true",
                    help="per-element report with percentages")
    game_op("ssas-check", "subsets-of-schedules closure test")
    p = game_op("reduce", "inducibility via the payoff-scaling reduction")
    p.add_argument("--target", type=int, required=True, metavar="K",
                   help="single 1-based target")

    exp = top.add_parser("experiment", help="run a batch experiment to CSV")
    exp.add_argument("mode", choices=MODES)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--n", type=int)
    exp.add_argument("--schedules", type=int)
    exp.add_argument("--l", type=int)
    exp.add_argument("--resources", type=int)
    exp.add_argument("--trials", type=int)
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--seed-fixture", choices=("example2",),
                     help="replace random instances with a built-in game "
                          "(overopt only)")
    exp.add_argument("--out", help="CSV output path (default: stdout)")

    gen = top.add_parser("gen", help="write a random game file")
    gen.add_argument("--out", required=True, help="game output path")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--schedules", type=int, default=5)
    gen.add_argument("--l", type=int, default=3)
    gen.add_argument("--resources", type=int, default=2)
    gen.add_argument("--ssas", action="store_true",
                     help="draw from the schedule-subset-closed family")
    return parser


def _print_report(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _check_target_flag(k: Optional[int], n: int) -> int:
    if k is None or not 1 <= k <= n:
        raise PreconditionError(
            f"--target must lie in 1..{n} (targets are 1-based in reports)")
    return k - 1


def _cmd_solve(args: argparse.Namespace) -> int:
    game = load_game(args.game)
    if args.operation == "sse":
        _print_report(Solver(game).sse().to_json_dict())
    elif args.operation == "ise":
        _print_report(Solver(game).ise().to_json_dict())
    elif args.operation == "guarantee":
        strategy = load_strategy(game, args.strategy)
        _print_report(Solver(game).utility_guarantee(strategy).to_json_dict())
    elif args.operation == "inducible":
        _cmd_inducible(game, args)
    elif args.operation == "ssas-check":
        _print_report({"ssas": ssas_check(game)})
    elif args.operation == "reduce":
        t = _check_target_flag(args.target, game.n)
        flag = inducibility_via_reduction(game, t)
        _print_report({"target": t + 1, "inducible": flag})
    return _EXIT_OK


def _cmd_inducible(game, args: argparse.Namespace) -> None:
    solver = Solver(game)
    if args.target is not None:
        t = _check_target_flag(args.target, game.n)
        flag, witness = solver.inducible_target(t)
        _print_report({
            "target": t + 1,
            "inducible": flag,
            "witness": None if witness is None else _strategy_json(witness),
        })
        return
    part = solver.inducible_elements()
    count = sum(len(e.targets) == 1 for e in part.elements if e.inducible)
    report = {
        "inducible_targets": count,
        "total_targets": game.n,
        "pct": format_decimal(Fraction(100 * count, game.n)),
    }
    if args.elements:
        report["elements"] = [{
            "element": e.index + 1,
            "targets": [t + 1 for t in e.targets],
            "inducible": bool(e.inducible),
        } for e in part.elements]
    else:
        report["targets"] = [{
            "target": e.targets[0] + 1,
            "inducible": bool(e.inducible),
        } for e in part.elements if len(e.targets) == 1]
    _print_report(report)


def _cmd_experiment(args: argparse.Namespace) -> int:
    defaults = _EXPERIMENT_DEFAULTS[args.mode]
    plan = ExperimentPlan(
        mode=args.mode,
        seed=args.seed,
        trials=defaults["trials"] if args.trials is None else args.trials,
        n=defaults["n"] if args.n is None else args.n,
        num_schedules=(defaults["schedules"] if args.schedules is None
                       else args.schedules),
        l=defaults["l"] if args.l is None else args.l,
        resources=(defaults["resources"] if args.resources is None
                   else args.resources),
        jobs=args.jobs,
        fixture=args.seed_fixture,
    )
    text = run_to_csv(plan, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return _EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = GeneratorConfig(seed=args.seed, n=args.n,
                          num_schedules=args.schedules, l=args.l,
                          resources=args.resources)
    game = random_ssas_game(cfg) if args.ssas else random_game(cfg)
    save_game(game, args.out)
    return _EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "seed_fixture", None) is not None \
            and args.mode != "overopt":
        sys.stderr.write("secgames: error: --seed-fixture applies to "
                         "overopt only\n")
        return _EXIT_USAGE
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_gen(args)
    except (GuardError, TooManyJointSchedulesError) as e:
        sys.stderr.write(f"secgames: limit: {e}\n")
        return _EXIT_GUARD
    except (GameFormatError, PreconditionError) as e:
        sys.stderr.write(f"secgames: error: {e}\n")
        return _EXIT_VALIDATION


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
