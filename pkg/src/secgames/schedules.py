"""Enumeration and pricing of joint schedules.

The defender's pure-strategy space is the set of joint schedules: one
schedule (or nothing) per resource.  Its size is exponential in the number
of resources, so the solvers either enumerate it under a cap or generate
columns on demand via `price_column`, which maximizes a linear score of the
coverage column exactly.

Resources with identical allowed pools are interchangeable; both routines
break that symmetry by forcing schedule choices to be nondecreasing within
each group of identical resources, with "unassigned" ordered before every
schedule index.
"""

from __future__ import annotations

from fractions import Fraction
from heapq import heappush, heapreplace
from math import gcd
from typing import Sequence

from .errors import InternalInvariantError, TooManyJointSchedulesError
from .game import JointSchedule, SecurityGame

ZERO = Fraction(0)


def _positions_by_group(game: SecurityGame) -> list[int | None]:
    """For each resource, the index of the previous resource with the same
    allowed pool, or None if it is the first of its group."""
    last_seen: dict[frozenset[int], int] = {}
    prev: list[int | None] = []
    for r, pool in enumerate(game.resources):
        prev.append(last_seen.get(pool))
        last_seen[pool] = r
    return prev


def _options(game: SecurityGame) -> list[list[int | None]]:
    # None first, then ascending schedule indices
    return [[None] + sorted(pool) for pool in game.resources]


def enumerate_joint_schedules(game: SecurityGame, cap: int = 100_000) -> list[JointSchedule]:
    """All feasible joint schedules, one per distinct coverage column.

    When several assignments induce the same column, the one with the
    lexicographically smallest assignment (unassigned before any schedule)
    is kept.  Output is sorted by assignment and always includes the empty
    joint schedule.  Raises TooManyJointSchedulesError as soon as the number
    of distinct columns exceeds `cap` (use the column-generation solver
    instead), or if the raw assignment walk exceeds a work limit.
    """
    options = _options(game)
    prev = _positions_by_group(game)
    num = game.num_resources
    work_cap = 64 * cap + 4096

    seen: dict[tuple[int, ...], None] = {}
    out: list[JointSchedule] = []
    assignment: list[int | None] = [None] * num
    work = 0

    def emit() -> None:
        nonlocal work
        work += 1
        if work > work_cap:
            raise TooManyJointSchedulesError(
                f"joint-schedule walk exceeded {work_cap} assignments; "
                f"use column generation")
        js = JointSchedule.build(game, assignment)
        if js.column not in seen:
            seen[js.column] = None
            if len(seen) > cap:
                raise TooManyJointSchedulesError(
                    f"more than {cap} distinct joint-schedule columns; "
                    f"use column generation")
            out.append(js)

    def walk(r: int) -> None:
        if r == num:
            emit()
            return
        opts = options[r]
        start = 0
        p = prev[r]
        if p is not None:
            # same pool as resource p: stay nondecreasing within the group
            start = opts.index(assignment[p])
        for i in range(start, len(opts)):
            assignment[r] = opts[i]
            walk(r + 1)
        assignment[r] = None

    walk(0)
    return out


def price_columns(game: SecurityGame, weights: Sequence[Fraction],
                  offset: Fraction,
                  k: int = 1) -> list[tuple[JointSchedule, Fraction]]:
    """Up to k joint schedules with the largest sum(weights[t] for covered t)
    - offset, best first, keeping only strictly positive covered-weight sums
    plus the empty schedule as a fallback.

    Exact depth-first branch-and-bound over per-resource choices.  The bound
    at a node is the current covered weight plus, for each unassigned
    resource, the best positive-part weight sum over its pool; this never
    underestimates because covering a target twice scores it once.  Subtrees
    are pruned against the k-th best value so far, so the top value is exact
    and ties keep the first assignment in lexicographic order (unassigned
    first); all-zero weights return just the empty joint schedule.
    """
    if len(weights) != game.n:
        raise InternalInvariantError(
            f"pricing weight vector has length {len(weights)}, game has "
            f"{game.n} targets")
    options = _options(game)
    prev = _positions_by_group(game)
    num = game.num_resources

    # the search runs on integers: scale the weights by their common
    # denominator once, then every node is integer adds and compares
    den = 1
    for w in weights:
        d = w.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    iw = [w.numerator * (den // w.denominator) for w in weights]

    sched_gain = [sum(iw[t] for t in s if iw[t] > 0) for s in game.schedules]
    gain = [max([0] + [sched_gain[s] for s in pool])
            for pool in game.resources]
    suffix = [0] * (num + 1)
    for r in range(num - 1, -1, -1):
        suffix[r] = suffix[r + 1] + gain[r]

    # min-heap of (val, -order, assignment); order breaks value ties toward
    # the earlier (lexicographically smaller) leaf when results are sorted
    found: list[tuple[int, int, tuple[int | None, ...]]] = []
    counter = 0
    assignment: list[int | None] = [None] * num
    cover_count = [0] * game.n

    def threshold() -> int:
        return found[0][0] if len(found) == k else 0

    def walk(r: int, val: int) -> None:
        nonlocal counter
        if val + suffix[r] <= threshold():
            return
        if r == num:
            counter += 1
            item = (val, -counter, tuple(assignment))
            if len(found) == k:
                heapreplace(found, item)
            else:
                heappush(found, item)
            return
        opts = options[r]
        start = 0
        p = prev[r]
        if p is not None:
            start = opts.index(assignment[p])
        for i in range(start, len(opts)):
            s = opts[i]
            assignment[r] = s
            if s is None:
                walk(r + 1, val)
                continue
            delta = 0
            for t in game.schedules[s]:
                cover_count[t] += 1
                if cover_count[t] == 1:
                    delta += iw[t]
            walk(r + 1, val + delta)
            for t in game.schedules[s]:
                cover_count[t] -= 1
        assignment[r] = None

    walk(0, 0)
    ranked = sorted(found, key=lambda it: (-it[0], -it[1]))
    if not ranked:
        ranked = [(0, 0, (None,) * num)]
    return [(JointSchedule.build(game, a), Fraction(v, den) - offset)
            for v, _, a in ranked]


def price_column(game: SecurityGame, weights: Sequence[Fraction],
                 offset: Fraction) -> tuple[JointSchedule, Fraction]:
    """The single best column from price_columns."""
    return price_columns(game, weights, offset, 1)[0]
