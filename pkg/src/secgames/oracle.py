"""Brute-force verifiers for the LP machinery.

Everything here is a deterministic exact scan: rational grids over the
joint-schedule simplex, or systematic pairwise mass transfers around a given
strategy.  Values are lower-bound probes (true optima live in the LP path);
the point is that an independent enumeration must never disagree with the
solver in the sound direction.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterator, Optional

from .errors import GuardError, PreconditionError
from .game import (JointSchedule, MixedStrategy, SecurityGame, attack_set,
                   coverage_of, validate_strategy, weak_tie_break)
from .equilibria import Solver
from .schedules import enumerate_joint_schedules

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_GRID_DENOMINATOR = 200
GRID_POINT_CAP = 2_000_000


def _grid_guard(num_columns: int, denominator: int) -> None:
    points = comb(denominator + num_columns - 1, num_columns - 1)
    if points > GRID_POINT_CAP:
        raise GuardError(
            f"grid of {points} points over {num_columns} joint schedules "
            f"(denominator {denominator}) exceeds the {GRID_POINT_CAP} cap")


def _grid_strategies(game: SecurityGame,
                     denominator: int) -> Iterator[MixedStrategy]:
    """Every probability vector with the given denominator over the full
    joint-schedule set, in lexicographic order of numerators."""
    columns = enumerate_joint_schedules(game)
    _grid_guard(len(columns), denominator)

    def parts(total: int, slots: int):
        if slots == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in parts(total - first, slots - 1):
                yield (first,) + rest

    for split in parts(denominator, len(columns)):
        yield MixedStrategy(tuple(
            (js, Fraction(k, denominator))
            for js, k in zip(columns, split) if k))


def inducible_brute(game: SecurityGame, t: int,
                    denominator: int = DEFAULT_GRID_DENOMINATOR) -> bool:
    """True when some grid strategy makes t the attacker's unique best
    response.  Sound for "true"; a "false" only means no witness on this
    grid."""
    if not 0 <= t < game.n:
        raise PreconditionError(f"target {t} outside 0..{game.n - 1}")
    for x in _grid_strategies(game, denominator):
        if attack_set(game, coverage_of(game, x)) == (t,):
            return True
    return False


def ise_brute(game: SecurityGame,
              denominator: int = DEFAULT_GRID_DENOMINATOR) -> Fraction:
    """Max utility guarantee over grid strategies, skipping degenerate ones.
    A lower bound on the best guarantee; exact whenever the optimal strategy
    lies on the grid."""
    solver = Solver(game)
    best: Optional[Fraction] = None
    for x in _grid_strategies(game, denominator):
        report = solver.utility_guarantee(x)
        if report.degenerate:
            continue
        if best is None or report.value > best:
            best = report.value
    if best is None:
        raise GuardError("every grid strategy had a degenerate guarantee")
    return best


def guarantee_by_perturbation(game: SecurityGame, x: MixedStrategy,
                              radius: Fraction,
                              samples: int = 5) -> Fraction:
    """Probe the worst-case defender utility near x: systematically shift
    probability mass between pairs of columns (the support plus one absent
    column at a time), in `samples` steps out to `radius` per direction, and
    return the largest weak tie-break value seen.

    The scan stays on the simplex and within sup-norm `radius` of x.  With
    radius 0 the result is exactly the weak tie-break value at x."""
    validate_strategy(game, x)
    radius = Fraction(radius)
    if radius < 0:
        raise PreconditionError(f"radius {radius} is negative")
    if samples < 1:
        raise PreconditionError("need at least one step")

    best, _ = weak_tie_break(game, coverage_of(game, x))
    if radius == 0:
        return best

    support = [js for js, _ in x.support]
    mass = {js.sort_key: p for js, p in x.support}
    extras = [js for js in enumerate_joint_schedules(game)
              if js.sort_key not in mass]

    def value_after(src: JointSchedule, dst: JointSchedule,
                    delta: Fraction) -> Fraction:
        moved = min(delta, mass[src.sort_key])
        shifted = dict(mass)
        shifted[src.sort_key] -= moved
        shifted[dst.sort_key] = shifted.get(dst.sort_key, ZERO) + moved
        x2 = MixedStrategy(tuple(
            (js, shifted[js.sort_key])
            for js in support + ([dst] if dst.sort_key not in mass else [])
            if shifted[js.sort_key] > 0))
        v, _ = weak_tie_break(game, coverage_of(game, x2))
        return v

    pairs = [(a, b) for a in support for b in support if a is not b]
    pairs += [(a, e) for e in extras for a in support]
    for src, dst in pairs:
        for k in range(1, samples + 1):
            delta = radius * k / samples
            v = value_after(src, dst, delta)
            if v > best:
                best = v
    return best
