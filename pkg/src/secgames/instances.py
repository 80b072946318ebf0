"""Instance generation and game-file I/O.

Randomness comes from a self-contained splitmix64 stream so that every
experiment table is reproducible bit-for-bit from its seed, across machines
and languages.  The algorithm, for 64-bit wrapping arithmetic:

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2^64
    z = (z XOR (z >> 27)) * 0x94D049BB133111EB  mod 2^64
    output = z XOR (z >> 31)

Frozen reference outputs (seed 0): 0xE220A8397B1DCDAF,
0x6E789E6AA1B965F4, 0x06C45D188009454F.  Integers in [lo, hi] are drawn as
lo + (output mod (hi - lo + 1)); the modulo bias is accepted and part of
the documented protocol.  Substream i of seed s is a fresh stream seeded
with the (i+1)-th raw output of a stream seeded s.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import GameFormatError, GuardError, PreconditionError
from .game import (JointSchedule, MixedStrategy, PayoffTable, SecurityGame,
                   TargetPayoffs)
from .rationals import format_rational, parse_rational

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(state: int) -> int:
    z = state & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit stream; see the module docstring for the
    protocol contract."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi] inclusive via modulo reduction."""
        if hi < lo:
            raise PreconditionError(f"empty integer range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def sample(self, population: Sequence[int], k: int) -> list[int]:
        """k distinct draws, order of selection, by index-pick-and-remove."""
        pool = list(population)
        if k > len(pool):
            raise PreconditionError(
                f"cannot sample {k} from population of {len(pool)}")
        out = []
        for _ in range(k):
            i = self.randint(0, len(pool) - 1)
            out.append(pool.pop(i))
        return out

    @staticmethod
    def substream(seed: int, index: int) -> "SplitMix64":
        if index < 0:
            raise PreconditionError("substream index must be nonnegative")
        return SplitMix64(_mix((seed + (index + 1) * _GOLDEN) & _MASK))


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the random-instance protocol.  Rewards are the payoffs a
    player wants (defender covered, attacker uncovered); penalties the ones
    it does not.  Ranges are closed integer intervals."""
    seed: int
    n: int
    num_schedules: int
    l: int
    resources: int
    reward_range: tuple[int, int] = (0, 5)
    penalty_range: tuple[int, int] = (-5, 0)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PreconditionError("need at least one target")
        if not 1 <= self.l <= self.n:
            raise PreconditionError(f"l={self.l} outside 1..{self.n}")
        if self.num_schedules < 1:
            raise PreconditionError("need at least one schedule")
        if self.resources < 1:
            raise PreconditionError("need at least one resource")
        rl, rh = self.reward_range
        pl, ph = self.penalty_range
        if rl > rh or rl < 0:
            raise PreconditionError(f"bad reward range {self.reward_range}")
        if pl > ph or ph > 0:
            raise PreconditionError(f"bad penalty range {self.penalty_range}")


def _draw_payoffs(rng: SplitMix64, cfg: GeneratorConfig) -> PayoffTable:
    rows = []
    for _ in range(cfg.n):
        # redraw a reward/penalty pair whenever the strict preference
        # inequality fails (only possible when both bounds allow 0)
        while True:
            d_cov = rng.randint(*cfg.reward_range)
            d_unc = rng.randint(*cfg.penalty_range)
            if d_cov > d_unc:
                break
        while True:
            a_unc = rng.randint(*cfg.reward_range)
            a_cov = rng.randint(*cfg.penalty_range)
            if a_unc > a_cov:
                break
        rows.append(TargetPayoffs(Fraction(d_cov), Fraction(d_unc),
                                  Fraction(a_cov), Fraction(a_unc)))
    return PayoffTable(tuple(rows))


def _draw_schedules(rng: SplitMix64, cfg: GeneratorConfig) -> tuple[frozenset[int], ...]:
    if cfg.l * cfg.num_schedules < cfg.n:
        raise PreconditionError(
            f"cannot cover {cfg.n} targets with {cfg.num_schedules} "
            f"schedules of size {cfg.l}")
    members = [set() for _ in range(cfg.num_schedules)]
    for t in range(cfg.n):
        members[t % cfg.num_schedules].add(t)
    for i, s in enumerate(members):
        free = [t for t in range(cfg.n) if t not in s]
        for t in rng.sample(free, cfg.l - len(s)):
            s.add(t)
    return tuple(frozenset(s) for s in members)


def random_game(cfg: GeneratorConfig) -> SecurityGame:
    """Random instance per the experiment protocol: integer payoffs from the
    configured ranges, schedules of exactly l targets built by round-robin
    seeding (so every target is covered) plus uniform fill, and homogeneous
    resources that may take any schedule."""
    rng = SplitMix64(cfg.seed)
    payoffs = _draw_payoffs(rng, cfg)
    schedules = _draw_schedules(rng, cfg)
    pools = (frozenset(range(cfg.num_schedules)),) * cfg.resources
    return SecurityGame(cfg.n, payoffs, schedules, pools)


def random_ssas_game(cfg: GeneratorConfig) -> SecurityGame:
    """Random instance whose schedule set is closed under nonempty subsets
    (so the subset-closure property holds).  Base schedules are generated as
    in random_game, then every missing nonempty subset is appended, ordered
    by size then membership.  Guarded to small l: closure is exponential."""
    if cfg.l > 4:
        raise GuardError(f"subset closure with l={cfg.l} > 4 refused")
    base = random_game(cfg)
    present = set(base.schedules)
    extra = set()
    for s in base.schedules:
        items = sorted(s)
        for size in range(1, len(items)):
            for sub in combinations(items, size):
                fs = frozenset(sub)
                if fs not in present:
                    extra.add(fs)
    ordered = tuple(base.schedules) + tuple(
        sorted(extra, key=lambda s: (len(s), sorted(s))))
    pools = (frozenset(range(len(ordered))),) * cfg.resources
    return SecurityGame(cfg.n, base.payoffs, ordered, pools)


def example2_game() -> SecurityGame:
    """Four-target regression fixture: attacker gains (1,2,3,4) uncovered
    and (-1,-2,-3,-8) covered; defender gets (1,100,2,30) covered and
    (-1,0,-2,-3) uncovered; schedules {0,1,2} and {3}; one resource."""
    F = Fraction
    payoffs = PayoffTable((
        TargetPayoffs(F(1), F(-1), F(-1), F(1)),
        TargetPayoffs(F(100), F(0), F(-2), F(2)),
        TargetPayoffs(F(2), F(-2), F(-3), F(3)),
        TargetPayoffs(F(30), F(-3), F(-8), F(4)),
    ))
    return SecurityGame(4, payoffs,
                        (frozenset({0, 1, 2}), frozenset({3})),
                        (frozenset({0, 1}),))


def random_strategy(game: SecurityGame, rng: SplitMix64,
                    max_support: int = 4) -> MixedStrategy:
    """Random mixed strategy: up to max_support random assignments (each
    resource unassigned or a uniform pool pick), deduplicated by column,
    with positive integer weights normalized to 1."""
    chosen: dict[tuple[int, ...], JointSchedule] = {}
    for _ in range(max_support):
        assignment = []
        for pool in game.resources:
            opts = [None] + sorted(pool)
            assignment.append(opts[rng.randint(0, len(opts) - 1)])
        js = JointSchedule.build(game, assignment)
        chosen.setdefault(js.column, js)
    entries = sorted(chosen.values(), key=lambda j: j.sort_key)
    weights = [rng.randint(1, 16) for _ in entries]
    total = sum(weights)
    return MixedStrategy(tuple(
        (js, Fraction(w, total)) for js, w in zip(entries, weights)))


# ---------- JSON I/O ----------

_TARGET_KEYS = ("def_cov", "def_unc", "att_cov", "att_unc")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise GameFormatError(msg)


def load_game(path: str) -> SecurityGame:
    """Read a game file, validating shape and model inequalities with
    field-path error messages.  Duplicate schedules are removed (first
    occurrence kept) with a warning, remapping resource pools."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise GameFormatError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise GameFormatError(f"{path}: invalid JSON at line {e.lineno}, "
                              f"column {e.colno}: {e.msg}") from e

    _require(isinstance(raw, dict), f"{path}: top level must be an object")
    allowed_top = {"n", "targets", "schedules", "resources", "homogeneous"}
    for key in raw:
        _require(key in allowed_top, f"{path}: unknown key {key!r}")
    for key in ("n", "targets", "schedules"):
        _require(key in raw, f"{path}: missing key {key!r}")
    n = raw["n"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 1,
             f"{path}: n must be a positive integer")
    targets = raw["targets"]
    _require(isinstance(targets, list) and len(targets) == n,
             f"{path}: targets must be a list of exactly n={n} objects")

    rows = []
    for i, entry in enumerate(targets):
        where = f"{path}: targets[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object")
        for key in entry:
            _require(key in _TARGET_KEYS, f"{where}: unknown key {key!r}")
        vals = {}
        for key in _TARGET_KEYS:
            _require(key in entry, f"{where}: missing {key!r}")
            vals[key] = parse_rational(entry[key], f"{where}.{key}")
        try:
            rows.append(TargetPayoffs(**vals))
        except GameFormatError as e:
            raise GameFormatError(f"{where}: {e}") from e

    schedules_raw = raw["schedules"]
    _require(isinstance(schedules_raw, list) and schedules_raw,
             f"{path}: schedules must be a nonempty list")
    schedules: list[frozenset[int]] = []
    remap: dict[int, int] = {}
    seen: dict[frozenset[int], int] = {}
    dropped = 0
    for i, entry in enumerate(schedules_raw):
        where = f"{path}: schedules[{i}]"
        _require(isinstance(entry, list) and entry,
                 f"{where} must be a nonempty list of target indices")
        for t in entry:
            _require(isinstance(t, int) and not isinstance(t, bool)
                     and 0 <= t < n,
                     f"{where}: target index {t!r} outside 0..{n - 1}")
        fs = frozenset(entry)
        _require(len(fs) == len(entry), f"{where}: repeated target index")
        if fs in seen:
            remap[i] = seen[fs]
            dropped += 1
        else:
            seen[fs] = len(schedules)
            remap[i] = len(schedules)
            schedules.append(fs)
    if dropped:
        warnings.warn(f"{path}: removed {dropped} duplicate schedule(s)")

    _require(("resources" in raw) != ("homogeneous" in raw),
             f"{path}: exactly one of 'resources' or 'homogeneous' required")
    pools: list[frozenset[int]] = []
    if "homogeneous" in raw:
        k = raw["homogeneous"]
        _require(isinstance(k, int) and not isinstance(k, bool) and k >= 0,
                 f"{path}: homogeneous must be a nonnegative integer")
        pools = [frozenset(range(len(schedules)))] * k
    else:
        res_raw = raw["resources"]
        _require(isinstance(res_raw, list),
                 f"{path}: resources must be a list")
        for i, entry in enumerate(res_raw):
            where = f"{path}: resources[{i}]"
            _require(isinstance(entry, dict) and set(entry) == {"allowed"},
                     f"{where} must be an object with key 'allowed'")
            allowed = entry["allowed"]
            _require(isinstance(allowed, list) and allowed,
                     f"{where}.allowed must be a nonempty list")
            mapped = set()
            for s in allowed:
                _require(isinstance(s, int) and not isinstance(s, bool)
                         and 0 <= s < len(schedules_raw),
                         f"{where}.allowed: schedule index {s!r} outside "
                         f"0..{len(schedules_raw) - 1}")
                mapped.add(remap[s])
            pools.append(frozenset(mapped))

    try:
        return SecurityGame(n, PayoffTable(tuple(rows)),
                            tuple(schedules), tuple(pools))
    except GameFormatError as e:
        raise GameFormatError(f"{path}: {e}") from e


def save_game(game: SecurityGame, path: str) -> None:
    """Write the JSON form: integers as bare numbers, other rationals as
    "p/q" strings, schedule and pool lists ascending.  Output is stable
    byte-for-byte for a given game."""
    def num(x: Fraction):
        return int(x) if x.denominator == 1 else format_rational(x)

    payload = {
        "n": game.n,
        "targets": [
            {key: num(getattr(game.payoffs[t], key)) for key in _TARGET_KEYS}
            for t in range(game.n)
        ],
        "schedules": [sorted(s) for s in game.schedules],
        "resources": [{"allowed": sorted(pool)} for pool in game.resources],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_strategy(game: SecurityGame, path: str) -> MixedStrategy:
    """Read a mixed strategy file: a JSON object mapping assignment keys
    (schedule index per resource, "-" for unassigned, comma-separated) to
    rational probabilities.  Every assignment is validated against the
    game's resource pools."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise GameFormatError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise GameFormatError(f"{path}: invalid JSON at line {e.lineno}, "
                              f"column {e.colno}: {e.msg}") from e
    _require(isinstance(raw, dict), f"{path}: top level must be an object")
    support: dict[JointSchedule, Fraction] = {}
    for key, value in raw.items():
        parts = [p.strip() for p in str(key).split(",")]
        _require(len(parts) == game.num_resources,
                 f"{path}: key {key!r} names {len(parts)} resources, "
                 f"game has {game.num_resources}")
        assignment: list[int | None] = []
        for p in parts:
            if p == "-":
                assignment.append(None)
            else:
                _require(p.isdigit(),
                         f"{path}: key {key!r} has a bad schedule index {p!r}")
                assignment.append(int(p))
        js = JointSchedule.build(game, assignment)
        _require(js not in support,
                 f"{path}: assignment {key!r} appears twice")
        support[js] = parse_rational(value, f"{path}: probability of {key!r}")
    return MixedStrategy.from_dict(support)
