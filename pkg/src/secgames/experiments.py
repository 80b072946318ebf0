"""Seeded batch experiments over random instances, written as CSV tables.

Three modes measure different things on the same kind of seeded instance
family: ``inducibility`` counts inducible targets per game, ``overopt``
compares the optimistic SSE value against the SSE and ISE utility
guarantees, and ``scalability`` times the SSE and ISE solves with column
generation forced on.

Tables are byte-deterministic for a given plan, including under
``jobs > 1``: every trial derives its generator stream from (seed, trial)
alone, and rows are emitted in trial order with a final aggregate row
labeled AGG.  Timing cells are the one exception to determinism.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .equilibria import Solver
from .errors import InternalInvariantError, PreconditionError
from .game import SecurityGame
from .instances import GeneratorConfig, SplitMix64, example2_game, random_game
from .rationals import format_decimal

ZERO = Fraction(0)

MODES = ("inducibility", "overopt", "scalability")

_PREFIX = ("trial", "seed", "n", "num_schedules", "l", "resources")
COLUMNS = {
    "inducibility": _PREFIX + ("inducible_targets", "total_targets",
                               "inducible_pct"),
    "overopt": _PREFIX + ("sse_u", "sse_g", "ise_g", "overopt", "subopt",
                          "degenerate"),
    "scalability": _PREFIX + ("sse_ms", "ise_ms"),
}


@dataclass(frozen=True)
class ExperimentPlan:
    """One CSV table worth of trials.

    fixture replaces the random instance with a named built-in game (only
    "example2" exists); the generator knobs are then ignored for the game
    itself but still echoed in the identification columns.
    """
    mode: str
    seed: int
    trials: int
    n: int
    num_schedules: int
    l: int
    resources: int
    jobs: int = 1
    fixture: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise PreconditionError(f"unknown experiment mode {self.mode!r}")
        if self.trials < 0:
            raise PreconditionError("trials must be nonnegative")
        if self.jobs < 1:
            raise PreconditionError("jobs must be positive")
        if self.fixture not in (None, "example2"):
            raise PreconditionError(f"unknown fixture {self.fixture!r}")


def _trial_game(plan: ExperimentPlan, trial: int) -> tuple[int, SecurityGame]:
    if plan.fixture == "example2":
        return plan.seed, example2_game()
    inst_seed = SplitMix64.substream(plan.seed, trial).next_u64()
    cfg = GeneratorConfig(seed=inst_seed, n=plan.n,
                          num_schedules=plan.num_schedules, l=plan.l,
                          resources=plan.resources)
    return inst_seed, random_game(cfg)


def _describe(game: SecurityGame) -> tuple[int, int, int, int]:
    return (game.n, len(game.schedules),
            max(len(s) for s in game.schedules), game.num_resources)


def _run_inducibility(args: tuple[ExperimentPlan, int]) -> tuple:
    plan, trial = args
    inst_seed, game = _trial_game(plan, trial)
    part = Solver(game).inducible_elements()
    count = sum(1 for e in part.elements
                if e.inducible and len(e.targets) == 1)
    return (trial, inst_seed, _describe(game), count, game.n,
            Fraction(100 * count, game.n))


def _run_overopt(args: tuple[ExperimentPlan, int]) -> tuple:
    plan, trial = args
    inst_seed, game = _trial_game(plan, trial)
    solver = Solver(game)
    sse = solver.sse()
    ise = solver.ise()
    report = solver.utility_guarantee(sse.strategy)
    sse_u, sse_g, ise_g = sse.optimistic_value, report.value, ise.guarantee
    if not sse_g <= ise_g <= sse_u:
        raise InternalInvariantError(
            f"trial {trial}: guarantee chain broken "
            f"({sse_g} <= {ise_g} <= {sse_u} fails)")
    return (trial, inst_seed, _describe(game), sse_u, sse_g, ise_g,
            int(sse_u > ise_g), int(sse_g < ise_g), int(report.degenerate))


def _run_scalability(args: tuple[ExperimentPlan, int]) -> tuple:
    plan, trial = args
    inst_seed, game = _trial_game(plan, trial)
    solver = Solver(game, "cg")
    t0 = time.perf_counter()
    solver.sse()
    t1 = time.perf_counter()
    solver.ise()
    t2 = time.perf_counter()
    return (trial, inst_seed, _describe(game),
            (t1 - t0) * 1000.0, (t2 - t1) * 1000.0)


_WORKERS = {
    "inducibility": _run_inducibility,
    "overopt": _run_overopt,
    "scalability": _run_scalability,
}


def _map_trials(worker, argses, jobs: int) -> list:
    if jobs <= 1 or len(argses) <= 1:
        return [worker(a) for a in argses]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, argses))


def _cell(x: object) -> str:
    if isinstance(x, Fraction):
        return format_decimal(x)
    if isinstance(x, float):
        return format(x, ".3f")
    return str(x)


def _mean(values: list[Fraction]) -> Fraction:
    return sum(values, ZERO) / len(values)


def run_experiment(plan: ExperimentPlan) -> list[list[str]]:
    """All CSV rows for the plan, header first, aggregate row last (no
    aggregate when there are no trials)."""
    worker = _WORKERS[plan.mode]
    results = _map_trials(worker, [(plan, k) for k in range(1, plan.trials + 1)],
                          plan.jobs)
    rows = [list(COLUMNS[plan.mode])]
    for res in results:
        trial, inst_seed, desc = res[0], res[1], res[2]
        rows.append([_cell(trial), _cell(inst_seed)]
                    + [_cell(v) for v in desc]
                    + [_cell(v) for v in res[3:]])
    if results:
        agg = ["AGG", _cell(plan.seed)] + [_cell(v) for v in results[0][2]]
        if plan.mode == "inducibility":
            agg += [_cell(_mean([Fraction(r[3]) for r in results])),
                    _cell(_mean([Fraction(r[4]) for r in results])),
                    _cell(_mean([r[5] for r in results]))]
        elif plan.mode == "overopt":
            agg += [_cell(_mean([r[i] for r in results])) for i in (3, 4, 5)]
            # the 0/1 columns aggregate to percentages: PeO, PeS, and the
            # share of trials whose SSE strategy had a degenerate guarantee
            agg += [_cell(Fraction(100 * sum(r[i] for r in results),
                                   len(results))) for i in (6, 7, 8)]
        else:
            agg += [_cell(sum(r[3] for r in results) / len(results)),
                    _cell(sum(r[4] for r in results) / len(results))]
        rows.append(agg)
    return rows


def render_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def run_to_csv(plan: ExperimentPlan, path: Optional[str] = None) -> str:
    """Run the plan and render the table; also writes it to path when
    given.  Returns the CSV text."""
    text = render_csv(run_experiment(plan))
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
