"""Domain model for security games with schedule constraints.

A game has n targets, a pool of schedules (each a nonempty subset of
targets), and resources that may each be assigned to one schedule from their
allowed pool, or left unassigned.  A defender mixed strategy randomizes over
joint schedules; the induced per-target coverage probability pins down both
players' expected utilities, because payoffs depend only on the attacked
target and whether it is covered.

Conventions: targets and schedules are 0-indexed everywhere in the library;
the CLI layer presents targets 1-indexed.  All payoffs and probabilities are
`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import GameFormatError, GuardError, InvalidStrategyError

ZERO = Fraction(0)
ONE = Fraction(1)

CoverageVector = tuple[Fraction, ...]


@dataclass(frozen=True)
class TargetPayoffs:
    """Per-target payoffs: defender covered/uncovered, attacker
    covered/uncovered.  The model requires the defender to strictly prefer a
    covered attack and the attacker an uncovered one."""
    def_cov: Fraction
    def_unc: Fraction
    att_cov: Fraction
    att_unc: Fraction

    def __post_init__(self) -> None:
        for name in ("def_cov", "def_unc", "att_cov", "att_unc"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))
        if not self.def_cov > self.def_unc:
            raise GameFormatError(
                f"defender payoffs must satisfy covered > uncovered, "
                f"got {self.def_cov} <= {self.def_unc}")
        if not self.att_unc > self.att_cov:
            raise GameFormatError(
                f"attacker payoffs must satisfy uncovered > covered, "
                f"got {self.att_unc} <= {self.att_cov}")


@dataclass(frozen=True)
class PayoffTable:
    targets: tuple[TargetPayoffs, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise GameFormatError("payoff table needs at least one target")

    def __getitem__(self, t: int) -> TargetPayoffs:
        return self.targets[t]

    def __len__(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class SecurityGame:
    """n targets, schedules as frozensets of target indices, resources as
    frozensets of allowed schedule indices."""
    n: int
    payoffs: PayoffTable
    schedules: tuple[frozenset[int], ...]
    resources: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GameFormatError("a game needs at least one target")
        if len(self.payoffs) != self.n:
            raise GameFormatError(
                f"payoff table has {len(self.payoffs)} rows for n={self.n}")
        object.__setattr__(self, "schedules",
                           tuple(frozenset(s) for s in self.schedules))
        object.__setattr__(self, "resources",
                           tuple(frozenset(r) for r in self.resources))
        for i, s in enumerate(self.schedules):
            if not s:
                raise GameFormatError(f"schedule {i} is empty")
            bad = [t for t in s if not 0 <= t < self.n]
            if bad:
                raise GameFormatError(f"schedule {i} references target {bad[0]} "
                                      f"outside 0..{self.n - 1}")
        for r, allowed in enumerate(self.resources):
            bad = [s for s in allowed if not 0 <= s < len(self.schedules)]
            if bad:
                raise GameFormatError(f"resource {r} allows schedule {bad[0]} "
                                      f"outside 0..{len(self.schedules) - 1}")

    @property
    def num_resources(self) -> int:
        return len(self.resources)


def covering_schedules(game: SecurityGame, target: int) -> tuple[int, ...]:
    """Indices of schedules containing the target, ascending."""
    return tuple(i for i, s in enumerate(game.schedules) if target in s)


@dataclass(frozen=True, order=True)
class JointSchedule:
    """One simultaneous assignment: per resource, a schedule index or None.

    `column` is the induced 0/1 coverage indicator per target (a target is
    covered when any assigned schedule contains it).  Ordering sorts by
    assignment with None before every schedule index.
    """
    sort_key: tuple[int, ...] = field(repr=False)
    assignment: tuple[int | None, ...] = field(compare=False)
    column: tuple[int, ...] = field(compare=False)

    @staticmethod
    def build(game: SecurityGame, assignment: Sequence[int | None]) -> "JointSchedule":
        assignment = tuple(assignment)
        if len(assignment) != game.num_resources:
            raise InvalidStrategyError(
                f"assignment length {len(assignment)} for "
                f"{game.num_resources} resources")
        covered = set()
        for r, s in enumerate(assignment):
            if s is None:
                continue
            if s not in game.resources[r]:
                raise InvalidStrategyError(
                    f"resource {r} may not take schedule {s}")
            covered |= game.schedules[s]
        column = tuple(1 if t in covered else 0 for t in range(game.n))
        key = tuple(-1 if s is None else s for s in assignment)
        return JointSchedule(key, assignment, column)

    @staticmethod
    def empty(game: SecurityGame) -> "JointSchedule":
        return JointSchedule.build(game, (None,) * game.num_resources)

    def __hash__(self) -> int:
        return hash(self.sort_key)


@dataclass(frozen=True)
class MixedStrategy:
    """Probability distribution over joint schedules.  Support entries are
    kept sorted by assignment so iteration order is deterministic."""
    support: tuple[tuple[JointSchedule, Fraction], ...]

    def __post_init__(self) -> None:
        entries = sorted(self.support, key=lambda e: e[0].sort_key)
        object.__setattr__(self, "support", tuple(entries))
        total = ZERO
        seen = set()
        for js, p in entries:
            if not isinstance(p, Fraction):
                raise InvalidStrategyError("probabilities must be Fractions")
            if p < 0:
                raise InvalidStrategyError(f"negative probability {p}")
            if js.sort_key in seen:
                raise InvalidStrategyError("duplicate joint schedule in support")
            seen.add(js.sort_key)
            total += p
        if total != 1:
            raise InvalidStrategyError(f"probabilities sum to {total}, not 1")

    @staticmethod
    def from_dict(mapping: Mapping[JointSchedule, Fraction]) -> "MixedStrategy":
        return MixedStrategy(tuple((js, p) for js, p in mapping.items() if p != 0))

    def as_dict(self) -> dict[JointSchedule, Fraction]:
        return {js: p for js, p in self.support}


def validate_strategy(game: SecurityGame, strategy: MixedStrategy) -> None:
    """Re-derive every support column against this game; rejects strategies
    whose joint schedules are not feasible here."""
    for js, _ in strategy.support:
        rebuilt = JointSchedule.build(game, js.assignment)
        if rebuilt.column != js.column:
            raise InvalidStrategyError(
                f"joint schedule {js.assignment} carries a stale coverage column")


def coverage_of(game: SecurityGame, strategy: MixedStrategy) -> CoverageVector:
    """Per-target coverage probability sum(x_j * column_j)."""
    validate_strategy(game, strategy)
    cov = [ZERO] * game.n
    for js, p in strategy.support:
        if p:
            for t, bit in enumerate(js.column):
                if bit:
                    cov[t] += p
    for t, c in enumerate(cov):
        if not (0 <= c <= 1):
            raise InvalidStrategyError(f"coverage of target {t} is {c}")
    return tuple(cov)


def attacker_utility(game: SecurityGame, coverage: Sequence[Fraction],
                     target: int) -> Fraction:
    p = game.payoffs[target]
    c = coverage[target]
    return c * p.att_cov + (1 - c) * p.att_unc


def defender_utility(game: SecurityGame, coverage: Sequence[Fraction],
                     target: int) -> Fraction:
    p = game.payoffs[target]
    c = coverage[target]
    return c * p.def_cov + (1 - c) * p.def_unc


def attacker_utility_mixed(game: SecurityGame, coverage: Sequence[Fraction],
                           attack: Mapping[int, Fraction]) -> Fraction:
    """Expected attacker utility under a mixed attack distribution."""
    return sum((q * attacker_utility(game, coverage, t)
                for t, q in attack.items() if q), ZERO)


def defender_utility_mixed(game: SecurityGame, coverage: Sequence[Fraction],
                           attack: Mapping[int, Fraction]) -> Fraction:
    return sum((q * defender_utility(game, coverage, t)
                for t, q in attack.items() if q), ZERO)


def attack_set(game: SecurityGame, coverage: Sequence[Fraction]) -> tuple[int, ...]:
    """Targets maximizing attacker utility at this coverage; never empty."""
    best = None
    members: list[int] = []
    for t in range(game.n):
        u = attacker_utility(game, coverage, t)
        if best is None or u > best:
            best = u
            members = [t]
        elif u == best:
            members.append(t)
    return tuple(members)


def strong_tie_break(game: SecurityGame, coverage: Sequence[Fraction]) -> tuple[Fraction, int]:
    """Defender value when the attacker breaks ties in the defender's favor:
    (max defender utility over the attack set, attacked target).  Residual
    ties go to the lowest target index."""
    gamma = attack_set(game, coverage)
    best_t = gamma[0]
    best_v = defender_utility(game, coverage, best_t)
    for t in gamma[1:]:
        v = defender_utility(game, coverage, t)
        if v > best_v:
            best_v, best_t = v, t
    return best_v, best_t


def weak_tie_break(game: SecurityGame, coverage: Sequence[Fraction]) -> tuple[Fraction, int]:
    """Defender value under the adversarial tie-break (min over the attack
    set); residual ties to the lowest target index."""
    gamma = attack_set(game, coverage)
    best_t = gamma[0]
    best_v = defender_utility(game, coverage, best_t)
    for t in gamma[1:]:
        v = defender_utility(game, coverage, t)
        if v < best_v:
            best_v, best_t = v, t
    return best_v, best_t


def tie_break_values(game: SecurityGame, strategy: MixedStrategy) -> tuple[Fraction, Fraction]:
    """(strong, weak) defender values of a strategy."""
    cov = coverage_of(game, strategy)
    return strong_tie_break(game, cov)[0], weak_tie_break(game, cov)[0]


# ---------- identical targets and elements ----------

def identical_targets(game: SecurityGame, t: int, u: int) -> bool:
    """True when the two targets have equal attacker payoffs and are covered
    by exactly the same schedules, which forces equal attacker utility under
    every defender strategy (equal coverage columns, equal payoffs)."""
    if t == u:
        return True
    pt, pu = game.payoffs[t], game.payoffs[u]
    if pt.att_cov != pu.att_cov or pt.att_unc != pu.att_unc:
        return False
    return covering_schedules(game, t) == covering_schedules(game, u)


@dataclass(frozen=True)
class Element:
    """A maximal class of mutually identical targets.  `inducible` is None
    until an equilibrium computation fills it in."""
    index: int
    targets: tuple[int, ...]
    inducible: bool | None = None

    @property
    def representative(self) -> int:
        return self.targets[0]


@dataclass(frozen=True)
class ElementPartition:
    elements: tuple[Element, ...]

    def element_of(self, target: int) -> Element:
        return self.elements[self.index_of(target)]

    def index_of(self, target: int) -> int:
        for e in self.elements:
            if target in e.targets:
                return e.index
        raise KeyError(target)

    def with_flags(self, flags: Mapping[int, bool]) -> "ElementPartition":
        return ElementPartition(tuple(
            replace(e, inducible=flags.get(e.index, e.inducible))
            for e in self.elements))


def element_partition(game: SecurityGame) -> ElementPartition:
    """Partition targets into elements, ordered by least member, members
    ascending.  Identity of attacker payoffs plus covering-schedule sets is
    an equivalence, so grouping by that key is the full partition."""
    groups: dict[tuple, list[int]] = {}
    for t in range(game.n):
        p = game.payoffs[t]
        key = (p.att_cov, p.att_unc, covering_schedules(game, t))
        groups.setdefault(key, []).append(t)
    ordered = sorted(groups.values(), key=lambda ts: ts[0])
    return ElementPartition(tuple(
        Element(i, tuple(sorted(ts))) for i, ts in enumerate(ordered)))


def element_attack_set(game: SecurityGame, partition: ElementPartition,
                       coverage: Sequence[Fraction]) -> tuple[int, ...]:
    """Element indices wholly contained in the attack set."""
    gamma = set(attack_set(game, coverage))
    return tuple(e.index for e in partition.elements
                 if all(t in gamma for t in e.targets))


def element_utilities(game: SecurityGame, element: Element,
                      coverage: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """(defender value, attacker value) of attacking an element: the
    defender gets the worst member, the attacker the common value."""
    def_v = min(defender_utility(game, coverage, t) for t in element.targets)
    att_v = attacker_utility(game, coverage, element.representative)
    return def_v, att_v


# ---------- subset-closure check ----------

_SUBSET_CHECK_CAP = 22


def _subset_closed(schedule_sets: Iterable[frozenset[int]]) -> bool:
    pool = set(schedule_sets)
    for s in list(pool):
        if len(s) > _SUBSET_CHECK_CAP:
            raise GuardError(
                f"subset-closure check on a schedule of size {len(s)} "
                f"would enumerate 2^{len(s)} subsets; refusing")
        items = sorted(s)
        for k in range(1, len(s)):
            for sub in combinations(items, k):
                if frozenset(sub) not in pool:
                    return False
    return True


def ssas_check(game: SecurityGame) -> bool:
    """True when every nonempty subset of every schedule is itself a
    schedule, globally and within each resource's allowed pool.  (The empty
    schedule is represented by leaving a resource unassigned, so it is not
    required to appear.)"""
    if not _subset_closed(game.schedules):
        return False
    for allowed in game.resources:
        if not _subset_closed(game.schedules[i] for i in allowed):
            return False
    return True
