"""Equilibrium and inducibility computations.

Everything here reduces to linear programs over joint-schedule probability
variables.  A strategy's per-target coverage is linear in those variables,
and both players' utilities are affine in coverage, so best-response
regions, inducibility gaps, and equilibrium values are all LP-expressible.

The solver runs each LP through a shared restricted-master loop: rows
(best-response and value constraints) are activated lazily when violated,
and in column-generation mode new joint schedules enter through an exact
pricing search.  A converged answer is exact: the final strategy satisfies
every constraint of the full program and no absent column has positive
reduced cost.  Positive inducibility/feasibility answers may finish early
through a direct witness check on the full game, which is sound under any
restricted master; negative answers always require full convergence.

Equilibrium strategies are canonicalized by a second solve that pins the
optimal objective and maximizes total expected coverage, making the
returned strategy stable across solver modes wherever that secondary
optimum is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import (GuardError, InternalInvariantError, PreconditionError,
                     TooManyJointSchedulesError)
from .game import (Element, ElementPartition, JointSchedule, MixedStrategy,
                   PayoffTable, SecurityGame, TargetPayoffs, attack_set,
                   attacker_utility, coverage_of, defender_utility,
                   element_attack_set, element_partition, element_utilities,
                   weak_tie_break)
from .lp import LinearProgram, LpStatus, solve as lp_solve
from .rationals import format_decimal, format_rational
from .schedules import enumerate_joint_schedules, price_columns

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_ENUM_CAP = 2000
_ROW_BATCH = 25
_MAX_MASTER_ITER = 100_000


def assignment_key(js: JointSchedule) -> str:
    """Stable string form of an assignment: schedule index per resource,
    '-' for unassigned, comma-separated."""
    return ",".join("-" if a is None else str(a) for a in js.assignment)


def _value_json(v: Fraction) -> dict:
    return {"exact": format_rational(v), "decimal": format_decimal(v)}


def _strategy_json(strategy: MixedStrategy) -> dict:
    return {assignment_key(js): format_rational(p)
            for js, p in strategy.support if p}


@dataclass(frozen=True)
class EquilibriumResult:
    """One solved equilibrium.  optimistic_value is the defender utility
    under the concept's tie-break rule; guarantee is the utility guarantee
    of the strategy (for ISE the two coincide by construction)."""
    concept: str
    strategy: MixedStrategy
    attacked_target: int
    attacked_element: int
    optimistic_value: Fraction
    guarantee: Fraction

    def to_json_dict(self) -> dict:
        # targets and elements are reported 1-based
        return {
            "concept": self.concept,
            "strategy": _strategy_json(self.strategy),
            "attacked_target": self.attacked_target + 1,
            "attacked_element": self.attacked_element + 1,
            "optimistic_value": _value_json(self.optimistic_value),
            "guarantee": _value_json(self.guarantee),
        }


@dataclass(frozen=True)
class GuaranteeReport:
    """Utility guarantee of a concrete strategy.  degenerate marks the case
    where no inducible element lies inside the attack set; the value then
    falls back to the adversarial tie-break at the strategy itself."""
    value: Fraction
    witness_element: Optional[int]
    degenerate: bool

    def to_json_dict(self) -> dict:
        return {
            "value": _value_json(self.value),
            "witness_element": (None if self.witness_element is None
                                else self.witness_element + 1),
            "degenerate": self.degenerate,
        }


# ---------- linear functionals over (coverage column, u) ----------

@dataclass(frozen=True)
class _Lin:
    """const + sum(weights[t] * column[t]) + u_coef * u."""
    const: Fraction
    weights: tuple[Fraction, ...]
    u_coef: Fraction = ZERO


@dataclass(frozen=True)
class _Row:
    lin: _Lin
    rel: str
    rhs: Fraction


def _col_coef(lin: _Lin, column: tuple[int, ...]) -> Fraction:
    acc = lin.const
    for w, bit in zip(lin.weights, column):
        if bit and w:
            acc += w
    return acc


@dataclass
class _GenOutcome:
    status: LpStatus
    objective: Optional[Fraction]
    strategy: Optional[MixedStrategy]
    u_value: Optional[Fraction]
    early: bool
    active: list[int]
    # attached by candidate solves for a later canonical re-solve
    rows: Optional[list[_Row]] = None
    pin: Optional[_Lin] = None


@dataclass
class _TargetInfo:
    feasible: bool
    inducible: Optional[bool]  # None when only feasibility was decided
    witness: Optional[MixedStrategy]


class Solver:
    """Per-game solver with a shared column pool and cached results.

    mode: 'enumerate' builds the full deduplicated column set (capped),
    'cg' prices columns on demand, 'auto' enumerates up to enum_cap and
    falls back to cg.
    """

    def __init__(self, game: SecurityGame, mode: str = "auto",
                 enum_cap: int = DEFAULT_ENUM_CAP) -> None:
        if mode not in ("auto", "enumerate", "cg"):
            raise PreconditionError(f"unknown solver mode {mode!r}")
        self.game = game
        self.partition = element_partition(game)
        # master LPs run over this working set; pricing appends to it
        self._pool: list[JointSchedule] = []
        self._pool_index: dict[tuple[int, ...], int] = {}
        self._flags: dict[int, bool] = {}
        self._target_info: dict[int, _TargetInfo] = {}
        self._sse_result: Optional[EquilibriumResult] = None
        self._ise_result: Optional[EquilibriumResult] = None

        self._universe: Optional[list[JointSchedule]] = None
        if mode == "enumerate":
            self._universe = enumerate_joint_schedules(game, enum_cap)
            self.mode = "enumerate"
        elif mode == "cg":
            self.mode = "cg"
        else:
            try:
                self._universe = enumerate_joint_schedules(game, enum_cap)
                self.mode = "enumerate"
            except TooManyJointSchedulesError:
                self.mode = "cg"
        self.cg = self.mode == "cg"
        # support lists (indices of covered targets) for universe pricing
        if self._universe is not None:
            self._usupport = [
                [t for t, bit in enumerate(js.column) if bit]
                for js in self._universe]
        self._pure_attack: Optional[list[tuple[int, ...]]] = None
        self._pool_attack: list[tuple[int, ...]] = []
        self._psupport: list[list[int]] = []
        self._element_witness: dict[int, MixedStrategy] = {}
        # total expected coverage can never exceed this under any strategy
        self._mass_bound = sum(
            max((len(game.schedules[s]) for s in pool), default=0)
            for pool in game.resources)
        self._add_column(JointSchedule.empty(self.game))
        for t in range(self.game.n):
            js = self._greedy_cover(t)
            if js is not None:
                self._add_column(js)
        # masters start from these columns plus any caller-provided hint
        self._seed_count = len(self._pool)

    def _greedy_cover(self, target: int) -> Optional[JointSchedule]:
        # lowest schedule containing the target, on the lowest resource
        # whose pool allows it
        for s, members in enumerate(self.game.schedules):
            if target not in members:
                continue
            for r, pool in enumerate(self.game.resources):
                if s in pool:
                    assignment = [None] * self.game.num_resources
                    assignment[r] = s
                    return JointSchedule.build(self.game, assignment)
        return None

    def _add_column(self, js: JointSchedule) -> bool:
        if js.column in self._pool_index:
            return False
        self._pool_index[js.column] = len(self._pool)
        self._pool.append(js)
        return True

    _PRICE_BATCH = 8
    _POOL_BATCH = 16

    def _pool_supports(self) -> list[list[int]]:
        # covered-target lists per pool column, extended as the pool grows
        while len(self._psupport) < len(self._pool):
            js = self._pool[len(self._psupport)]
            self._psupport.append(
                [t for t, bit in enumerate(js.column) if bit])
        return self._psupport

    def _price_from_universe(self, weights: list[Fraction], base: Fraction,
                             in_master: set[int], ctx: str) -> list[int]:
        """Exact pricing by scanning the enumerated column universe; returns
        the pool indices of up to a batch of positive-reduced-cost columns,
        adding them to the pool when new.  A hit already in the master
        contradicts its optimality."""
        found: list[tuple[Fraction, int]] = []
        for idx, support in enumerate(self._usupport):
            rc = base
            for t in support:
                if weights[t]:
                    rc += weights[t]
            if rc > 0:
                found.append((rc, idx))
        found.sort(key=lambda p: (-p[0], p[1]))
        picked: list[int] = []
        for _, idx in found[:self._PRICE_BATCH]:
            js = self._universe[idx]
            self._add_column(js)
            j = self._pool_index[js.column]
            if j in in_master:
                raise InternalInvariantError(
                    f"{ctx}: a master column priced positive")
            picked.append(j)
        return picked

    # ---------- restricted-master loop ----------

    def _generate(self, objective: _Lin, rows: Sequence[_Row],
                  active_init: Sequence[int], use_u: bool,
                  early_stop: Optional[Callable[[MixedStrategy, Optional[Fraction]], bool]] = None,
                  ctx: str = "",
                  hint: Optional[MixedStrategy] = None) -> _GenOutcome:
        game = self.game
        active = sorted(set(active_init))
        active_set = set(active)
        # coefficient caches indexed like the pool, extended lazily
        obj_coefs: list[Fraction] = []
        row_coefs: dict[int, list[Fraction]] = {}

        def extend(lin: _Lin, into: list[Fraction]) -> list[Fraction]:
            for js in self._pool[len(into):]:
                into.append(_col_coef(lin, js.column))
            return into

        # the master runs over a working subset of the pool: the seed
        # columns, the hint's support, and whatever pricing brings in;
        # pricing over the full space still certifies optimality, and an
        # infeasible subset master widens to the whole pool before the
        # verdict stands
        colset = set(range(self._seed_count))
        if hint is not None:
            colset.update(self._pool_index[js.column]
                          for js, _ in hint.support)
        cols = sorted(colset)
        widened = False

        def admit(j: int) -> None:
            if j not in colset:
                colset.add(j)
                cols.append(j)

        for _ in range(_MAX_MASTER_ITER):
            extend(objective, obj_coefs)
            lp = LinearProgram("max")
            if use_u:
                lp.add_variable(obj=objective.u_coef, lower=None)
            for j in cols:
                lp.add_variable(obj=obj_coefs[j])
            for i in active:
                r = rows[i]
                cs = extend(r.lin, row_coefs.setdefault(i, []))
                coeffs = ([r.lin.u_coef] if use_u else []) + [cs[j]
                                                              for j in cols]
                lp.add_row(coeffs, r.rel, r.rhs)
            sol = lp_solve(lp)
            if sol.status is LpStatus.INFEASIBLE:
                if not widened and len(cols) < len(self._pool):
                    widened = True
                    colset = set(range(len(self._pool)))
                    cols = sorted(colset)
                    continue
                # the whole pool cannot satisfy the active rows; with the
                # full row set a relaxation, the verdict is final
                return _GenOutcome(LpStatus.INFEASIBLE, None, None, None,
                                   False, active)
            if sol.status is not LpStatus.OPTIMAL:
                raise InternalInvariantError(f"{ctx}: master LP unbounded")

            off = 1 if use_u else 0
            u_val = sol.primal[0] if use_u else None
            strat = MixedStrategy.from_dict(
                {self._pool[j]: p
                 for j, p in zip(cols, sol.primal[off:]) if p})
            if early_stop is not None and early_stop(strat, u_val):
                return _GenOutcome(LpStatus.OPTIMAL, sol.objective, strat,
                                   u_val, True, active)

            weights = list(objective.weights)
            base = objective.const
            for y, i in zip(sol.duals, active):
                if y:
                    lin = rows[i].lin
                    base -= y * lin.const
                    for t in range(game.n):
                        if lin.weights[t]:
                            weights[t] -= y * lin.weights[t]
            if self.cg:
                # first re-admit pool columns that price positive; the scan
                # is complete, so a miss clears the whole pool
                stale: list[tuple[Fraction, int]] = []
                supports = self._pool_supports()
                for j in range(len(self._pool)):
                    if j in colset:
                        continue
                    rc = base
                    for t in supports[j]:
                        if weights[t]:
                            rc += weights[t]
                    if rc > 0:
                        stale.append((rc, j))
                if stale:
                    stale.sort(key=lambda p: (-p[0], p[1]))
                    for _, j in stale[:self._POOL_BATCH]:
                        admit(j)
                    continue
                added = False
                batch: set[int] = set()
                for js, rc in price_columns(game, weights, -base,
                                            self._PRICE_BATCH):
                    if rc <= 0:
                        break
                    fresh = self._add_column(js)
                    j = self._pool_index[js.column]
                    if not fresh and j not in batch:
                        # master and pool columns all price nonpositive
                        # here, so a known column cannot come back positive
                        raise InternalInvariantError(
                            f"{ctx}: pricing returned a known column "
                            f"with reduced cost {rc}")
                    batch.add(j)
                    admit(j)
                    added = True
                if added:
                    continue
            else:
                picked = self._price_from_universe(weights, base, colset, ctx)
                if picked:
                    for j in picked:
                        admit(j)
                    continue

            cov = [ZERO] * game.n
            for js, p in strat.support:
                for t, bit in enumerate(js.column):
                    if bit:
                        cov[t] += p
            violated = []
            for i, r in enumerate(rows):
                if i in active_set:
                    continue
                val = r.lin.const  # probabilities sum to 1
                for w, c in zip(r.lin.weights, cov):
                    if w and c:
                        val += w * c
                if use_u and r.lin.u_coef:
                    val += r.lin.u_coef * u_val
                bad = ((r.rel == "<=" and val > r.rhs)
                       or (r.rel == ">=" and val < r.rhs)
                       or (r.rel in ("=", "==") and val != r.rhs))
                if bad:
                    violated.append(i)
                    if len(violated) >= _ROW_BATCH:
                        break
            if violated:
                active.extend(violated)
                active.sort()
                active_set.update(violated)
                continue
            return _GenOutcome(LpStatus.OPTIMAL, sol.objective, strat, u_val,
                               False, active)
        raise InternalInvariantError(f"{ctx}: master loop did not converge")

    # ---------- row builders ----------

    def _sum_row(self) -> _Row:
        return _Row(_Lin(ONE, (ZERO,) * self.game.n), "=", ONE)

    def _dominance_lin(self, a: int, b: int, with_u: bool) -> _Lin:
        # attacker prefers a over b: U_a(x,a) - U_a(x,b) [- u] >= 0
        p = self.game.payoffs
        w = [ZERO] * self.game.n
        w[a] += p[a].att_cov - p[a].att_unc
        w[b] -= p[b].att_cov - p[b].att_unc
        return _Lin(p[a].att_unc - p[b].att_unc, tuple(w),
                    Fraction(-1) if with_u else ZERO)

    def _defender_cap_row(self, t: int) -> _Row:
        # u <= U_d(x,t)
        p = self.game.payoffs[t]
        w = [ZERO] * self.game.n
        w[t] = p.def_cov - p.def_unc
        return _Row(_Lin(p.def_unc, tuple(w), Fraction(-1)), ">=", ZERO)

    def _seed_rival(self, rivals: Sequence[int]) -> int:
        # position of the strongest rival (highest uncovered attacker
        # payoff, lowest index on ties) within the rivals sequence
        best_pos = 0
        best = self.game.payoffs[rivals[0]].att_unc
        for pos, t in enumerate(rivals[1:], 1):
            v = self.game.payoffs[t].att_unc
            if v > best:
                best, best_pos = v, pos
        return best_pos

    def _gap_at(self, strategy: MixedStrategy, members: Sequence[int]) -> Fraction:
        """min over outside targets of U_a(rep) - U_a(t'); positive iff the
        attack set is exactly `members`."""
        cov = coverage_of(self.game, strategy)
        rep = members[0]
        inside = set(members)
        ua_rep = attacker_utility(self.game, cov, rep)
        gap = None
        for t in range(self.game.n):
            if t in inside:
                continue
            g = ua_rep - attacker_utility(self.game, cov, t)
            if gap is None or g < gap:
                gap = g
        if gap is None:
            raise InternalInvariantError("gap query with no outside targets")
        return gap

    # ---------- cheap exact certificates ----------

    def _demand_exceeds_mass(self, att_unc_t: Fraction,
                             rivals: Sequence[int]) -> bool:
        """True when the coverage needed to pull every rival's attacker
        utility down to att_unc_t exceeds what any strategy can supply.

        A rival v with uncovered payoff above att_unc_t needs coverage of at
        least (att_unc[v] - att_unc_t) / (att_unc[v] - att_cov[v]), and total
        expected coverage is capped by summing each resource's largest
        schedule.  Exceeding the cap rules out even weak optimality of the
        target, since its own utility never exceeds att_unc_t."""
        total = ZERO
        for v in rivals:
            p = self.game.payoffs[v]
            if p.att_unc > att_unc_t:
                total += (p.att_unc - att_unc_t) / (p.att_unc - p.att_cov)
                if total > self._mass_bound:
                    return True
        return False

    def _pure_attack_sets(self) -> list[tuple[int, ...]]:
        # attack set of each enumerated joint schedule played as-is
        if self._pure_attack is None:
            sets = []
            for js in self._universe:
                cov = tuple(Fraction(bit) for bit in js.column)
                sets.append(attack_set(self.game, cov))
            self._pure_attack = sets
        return self._pure_attack

    def _pool_attack_sets(self) -> list[tuple[int, ...]]:
        # attack sets of the working-set columns played as-is; the pool only
        # grows, so the cache extends incrementally
        while len(self._pool_attack) < len(self._pool):
            js = self._pool[len(self._pool_attack)]
            cov = tuple(Fraction(bit) for bit in js.column)
            self._pool_attack.append(attack_set(self.game, cov))
        return self._pool_attack

    # ---------- target feasibility / inducibility (gap LP) ----------

    def _target_gap(self, t: int, need_strict: bool) -> _TargetInfo:
        cached = self._target_info.get(t)
        if cached is not None and (not need_strict or cached.inducible is not None):
            return cached
        info = self._resolve_target_gap(t, need_strict)
        self._target_info[t] = info
        if info.inducible is not None:
            # share the answer with the matching one-target element, whose
            # gap program is the same
            ei = self.partition.index_of(t)
            if len(self.partition.elements[ei].targets) == 1:
                self._flags.setdefault(ei, bool(info.inducible))
        return info

    def _resolve_target_gap(self, t: int, need_strict: bool) -> _TargetInfo:
        game = self.game
        if game.n == 1:
            return _TargetInfo(True, True,
                               MixedStrategy(((JointSchedule.empty(game), ONE),)))

        rivals = [v for v in range(game.n) if v != t]
        if self._demand_exceeds_mass(game.payoffs[t].att_unc, rivals):
            return _TargetInfo(False, False, None)
        if self._universe is not None:
            info = self._pure_target_witness(t, need_strict,
                                             self._pure_attack_sets(),
                                             self._universe)
        else:
            info = self._pure_target_witness(t, need_strict,
                                             self._pool_attack_sets(),
                                             self._pool)
        if info is not None:
            return info

        rows = [self._sum_row()] + [
            _Row(self._dominance_lin(t, v, True), ">=", ZERO) for v in rivals]
        active = [0, 1 + self._seed_rival(rivals)]
        objective = _Lin(ZERO, (ZERO,) * game.n, ONE)

        hit: list[_TargetInfo] = []

        def stop(strat: MixedStrategy, _u) -> bool:
            g = self._gap_at(strat, (t,))
            if g > 0:
                hit.append(_TargetInfo(True, True, strat))
                return True
            if not need_strict and g >= 0:
                hit.append(_TargetInfo(True, None, strat))
                return True
            return False

        out = self._generate(objective, rows, active, True, stop,
                             ctx=f"gap LP for target {t}")
        if out.status is not LpStatus.OPTIMAL:
            raise InternalInvariantError(
                f"gap LP for target {t} reported {out.status}")
        if out.early:
            return hit[0]
        u = out.u_value
        # keep the final strategy even at u == 0: it witnesses feasibility
        # and warms the later value LP (inducible_target still reports a
        # witness only for strict answers)
        return _TargetInfo(u >= 0, u > 0, out.strategy if u >= 0 else None)

    def _pure_target_witness(
            self, t: int, need_strict: bool,
            attack_sets: Sequence[tuple[int, ...]],
            columns: Sequence[JointSchedule]) -> Optional[_TargetInfo]:
        """Scan pure strategies for one answering the query positively; the
        witness column joins the working set so later value LPs stay
        feasible.  A miss proves nothing when the scan covers only the
        working set, so the caller falls through to the LP."""
        member_hit = None
        for i, aset in enumerate(attack_sets):
            if aset == (t,):
                js = columns[i]
                self._add_column(js)
                return _TargetInfo(True, True, MixedStrategy(((js, ONE),)))
            if member_hit is None and t in aset:
                member_hit = i
        if not need_strict and member_hit is not None:
            js = columns[member_hit]
            self._add_column(js)
            return _TargetInfo(True, None, MixedStrategy(((js, ONE),)))
        return None

    def inducible_target(self, t: int) -> tuple[bool, Optional[MixedStrategy]]:
        """Whether some strategy makes t the attacker's unique best
        response, with a witness when true."""
        self._check_target(t)
        info = self._target_gap(t, need_strict=True)
        return bool(info.inducible), (info.witness if info.inducible else None)

    def feasible_target(self, t: int) -> bool:
        """Whether some strategy puts t in the attack set (weak version of
        inducibility)."""
        self._check_target(t)
        return self._target_gap(t, need_strict=False).feasible

    def _check_target(self, t: int) -> None:
        if not 0 <= t < self.game.n:
            raise PreconditionError(
                f"target {t} outside 0..{self.game.n - 1}")

    # ---------- element inducibility ----------

    def _element_inducible(self, e: Element) -> bool:
        part = self.partition
        if len(part.elements) == 1:
            return True  # the attack set always equals the single element
        game = self.game
        rep = e.representative
        # a one-target element is inducible exactly when its target is: the
        # two gap programs coincide (non-representative members of other
        # elements share their representative's utilities under every
        # strategy), so the answers are shared both ways through the cache
        singleton = len(e.targets) == 1

        def settle(feasible, inducible, witness) -> bool:
            if singleton:
                cached = self._target_info.get(rep)
                if cached is None or (cached.inducible is None
                                      and inducible is not None):
                    self._target_info[rep] = _TargetInfo(feasible, inducible,
                                                         witness)
            if inducible and witness is not None:
                self._element_witness[e.index] = witness
            return bool(inducible)

        if singleton:
            cached = self._target_info.get(rep)
            if cached is not None and cached.inducible is not None:
                return bool(cached.inducible)
        rival_reps = [x.representative for x in part.elements if x.index != e.index]
        if self._demand_exceeds_mass(game.payoffs[rep].att_unc, rival_reps):
            return settle(False, False, None)
        if self._universe is not None:
            sets, cols = self._pure_attack_sets(), self._universe
        else:
            sets, cols = self._pool_attack_sets(), self._pool
        for i, aset in enumerate(sets):
            if aset == e.targets:
                js = cols[i]
                self._add_column(js)
                return settle(True, True, MixedStrategy(((js, ONE),)))
        rows = [self._sum_row()] + [
            _Row(self._dominance_lin(rep, v, True), ">=", ZERO)
            for v in rival_reps]
        active = [0, 1 + self._seed_rival(rival_reps)]
        objective = _Lin(ZERO, (ZERO,) * game.n, ONE)

        def stop(strat: MixedStrategy, _u) -> bool:
            return self._gap_at(strat, e.targets) > 0

        out = self._generate(objective, rows, active, True, stop,
                             ctx=f"gap LP for element {e.index}")
        if out.status is not LpStatus.OPTIMAL:
            raise InternalInvariantError(
                f"element gap LP {e.index} reported {out.status}")
        if out.early:
            return settle(True, True, out.strategy)
        good = out.u_value > 0
        return settle(out.u_value >= 0, good,
                      out.strategy if out.u_value >= 0 else None)

    def _element_flag(self, i: int) -> bool:
        f = self._flags.get(i)
        if f is None:
            f = self._flags[i] = self._element_inducible(
                self.partition.elements[i])
        return f

    def inducible_elements(self) -> ElementPartition:
        """The element partition with inducibility flags filled in."""
        for e in self.partition.elements:
            self._element_flag(e.index)
        return self.partition.with_flags(self._flags)

    # ---------- utility guarantee ----------

    def utility_guarantee(self, strategy: MixedStrategy) -> GuaranteeReport:
        game = self.game
        part = self.partition
        cov = coverage_of(game, strategy)
        in_attack = element_attack_set(game, part, cov)
        candidates = [i for i in in_attack if self._element_flag(i)]
        if not candidates:
            value, _ = weak_tie_break(game, cov)
            return GuaranteeReport(value, None, True)
        best_i = None
        best_v = None
        for i in candidates:
            dv, _ = element_utilities(game, part.elements[i], cov)
            if best_v is None or dv > best_v:
                best_v, best_i = dv, i
        return GuaranteeReport(best_v, best_i, False)

    # ---------- SSE ----------

    def _sse_candidate(self, t: int) -> Optional[_GenOutcome]:
        """Best defender value with t held weakly optimal for the attacker;
        None when that region is empty.

        The feasibility question is settled first through the gap LP, whose
        master never lacks columns (the free variable makes any working set
        feasible).  Every positive answer leaves a witness supported on the
        working set, so the value LP's master is feasible by construction
        and an INFEASIBLE report from it is an engine fault."""
        game = self.game
        info = self._target_gap(t, need_strict=False)
        if not info.feasible:
            return None
        p = game.payoffs[t]
        w = [ZERO] * game.n
        w[t] = p.def_cov - p.def_unc
        objective = _Lin(p.def_unc, tuple(w))
        rivals = [v for v in range(game.n) if v != t]
        rows = [self._sum_row()] + [
            _Row(self._dominance_lin(t, v, False), ">=", ZERO) for v in rivals]
        active = [0] if not rivals else [0, 1 + self._seed_rival(rivals)]
        out = self._generate(objective, rows, active, False,
                             ctx=f"value LP for target {t}",
                             hint=info.witness)
        if out.status is LpStatus.INFEASIBLE:
            raise InternalInvariantError(
                f"value LP for target {t} infeasible after a positive "
                f"feasibility certificate")
        out.rows = rows
        out.pin = objective
        return out

    def _canonicalize(self, out: _GenOutcome, use_u: bool) -> None:
        """Re-solve with the objective pinned at its optimum, maximizing
        total expected coverage; rewrites out.strategy in place."""
        pin_row = _Row(out.pin, "=", out.objective)
        rows2 = list(out.rows) + [pin_row]
        active = list(out.active) + [len(rows2) - 1]
        secondary = _Lin(ZERO, (ONE,) * self.game.n)
        out2 = self._generate(secondary, rows2, active, use_u,
                              ctx="canonical re-solve", hint=out.strategy)
        if out2.status is not LpStatus.OPTIMAL:
            raise InternalInvariantError(
                f"canonical re-solve reported {out2.status}")
        out.strategy = out2.strategy
        if use_u:
            out.u_value = out2.u_value

    def sse(self) -> EquilibriumResult:
        """Multi-LP optimum: best defender utility over all choices of the
        attacker's (weakly optimal) target; ties to the lowest target."""
        if self._sse_result is not None:
            return self._sse_result
        game = self.game
        order = sorted(range(game.n),
                       key=lambda t: (-game.payoffs[t].def_cov, t))
        best_v = best_t = best_out = None
        for t in order:
            bound = game.payoffs[t].def_cov  # value at full coverage
            if best_v is not None:
                if bound < best_v:
                    break
                if bound == best_v and t > best_t:
                    continue
            out = self._sse_candidate(t)
            if out is None:
                continue
            v = out.objective
            if best_v is None or v > best_v or (v == best_v and t < best_t):
                best_v, best_t, best_out = v, t, out
        if best_out is None:
            raise InternalInvariantError("every target's value LP infeasible")
        self._canonicalize(best_out, use_u=False)
        guarantee = self.utility_guarantee(best_out.strategy)
        self._sse_result = EquilibriumResult(
            concept="SSE",
            strategy=best_out.strategy,
            attacked_target=best_t,
            attacked_element=self.partition.index_of(best_t),
            optimistic_value=best_v,
            guarantee=guarantee.value,
        )
        return self._sse_result

    # ---------- ISE ----------

    def _ise_candidate(self, e: Element) -> _GenOutcome:
        game = self.game
        part = self.partition
        rep = e.representative
        rows = [self._sum_row()]
        for other in part.elements:
            if other.index != e.index:
                rows.append(_Row(self._dominance_lin(rep, other.representative,
                                                     False), ">=", ZERO))
        cap_first = len(rows)
        for t in e.targets:
            rows.append(self._defender_cap_row(t))
        # value caps must be active from the start so u is bounded
        active = [0] + list(range(cap_first, len(rows)))
        if cap_first > 1:
            rival_reps = [x.representative for x in part.elements
                          if x.index != e.index]
            active.append(1 + self._seed_rival(rival_reps))
        objective = _Lin(ZERO, (ZERO,) * game.n, ONE)
        hint = self._element_witness.get(e.index)
        if hint is None and len(e.targets) == 1:
            cached = self._target_info.get(rep)
            if cached is not None:
                hint = cached.witness
        out = self._generate(objective, rows, active, True,
                             ctx=f"value LP for element {e.index}",
                             hint=hint)
        if out.status is not LpStatus.OPTIMAL:
            raise InternalInvariantError(
                f"value LP for inducible element {e.index} reported "
                f"{out.status}")
        out.rows = rows
        out.pin = _Lin(ZERO, (ZERO,) * game.n, ONE)
        return out

    def ise(self) -> EquilibriumResult:
        """Best utility guarantee: one LP per inducible element maximizing
        the worst defender utility inside it while it stays weakly optimal
        for the attacker; ties to the lowest element index."""
        if self._ise_result is not None:
            return self._ise_result
        game = self.game
        order = sorted(self.partition.elements,
                       key=lambda e: (-min(game.payoffs[t].def_cov
                                           for t in e.targets), e.index))
        best_v = best_e = best_out = None
        for e in order:
            bound = min(game.payoffs[t].def_cov for t in e.targets)
            if best_v is not None:
                if bound < best_v:
                    break
                if bound == best_v and e.index > best_e.index:
                    continue
            if not self._element_flag(e.index):
                continue
            out = self._ise_candidate(e)
            v = out.u_value
            if best_v is None or v > best_v or (v == best_v
                                                and e.index < best_e.index):
                best_v, best_e, best_out = v, e, out
        if best_out is None:
            raise InternalInvariantError(
                "no element is inducible; the guarantee is undefined here")
        self._canonicalize(best_out, use_u=True)
        cov = coverage_of(game, best_out.strategy)
        attacked = min(
            best_e.targets,
            key=lambda t: (defender_utility(game, cov, t), t))
        self._ise_result = EquilibriumResult(
            concept="ISE",
            strategy=best_out.strategy,
            attacked_target=attacked,
            attacked_element=best_e.index,
            optimistic_value=best_v,
            guarantee=best_v,
        )
        return self._ise_result

    # ---------- derived judgments ----------

    def sse_overoptimistic(self) -> bool:
        r = self.sse()
        return r.optimistic_value > r.guarantee

    def sse_suboptimal(self) -> bool:
        return self.sse().guarantee < self.ise().guarantee


# ---------- module-level conveniences ----------

def sse(game: SecurityGame, mode: str = "auto") -> EquilibriumResult:
    return Solver(game, mode).sse()


def ise(game: SecurityGame, mode: str = "auto") -> EquilibriumResult:
    return Solver(game, mode).ise()


def utility_guarantee(game: SecurityGame, strategy: MixedStrategy,
                      mode: str = "auto") -> GuaranteeReport:
    return Solver(game, mode).utility_guarantee(strategy)


def inducible_target(game: SecurityGame, t: int,
                     mode: str = "auto") -> tuple[bool, Optional[MixedStrategy]]:
    return Solver(game, mode).inducible_target(t)


def inducible_elements(game: SecurityGame, mode: str = "auto") -> ElementPartition:
    return Solver(game, mode).inducible_elements()


def feasible_target(game: SecurityGame, t: int, mode: str = "auto") -> bool:
    return Solver(game, mode).feasible_target(t)


def sse_overoptimistic(game: SecurityGame, mode: str = "auto") -> bool:
    return Solver(game, mode).sse_overoptimistic()


def sse_suboptimal(game: SecurityGame, mode: str = "auto") -> bool:
    return Solver(game, mode).sse_suboptimal()


# ---------- feasibility via a modified-payoff SSE ----------

def _with_preference_payoffs(game: SecurityGame, t: int) -> SecurityGame:
    """Defender payoffs replaced so that an attack on t is always preferred
    by the defender: other targets pay 2 covered / 1 uncovered, t pays 4
    covered / 3 uncovered.  Attacker payoffs unchanged."""
    rows = []
    for v in range(game.n):
        p = game.payoffs[v]
        if v == t:
            rows.append(TargetPayoffs(Fraction(4), Fraction(3),
                                      p.att_cov, p.att_unc))
        else:
            rows.append(TargetPayoffs(Fraction(2), Fraction(1),
                                      p.att_cov, p.att_unc))
    return SecurityGame(game.n, PayoffTable(tuple(rows)), game.schedules,
                        game.resources)


def feasible_target_via_sse(game: SecurityGame, t: int,
                            mode: str = "auto") -> bool:
    """Feasibility decided through a single SSE computation on the
    preference-modified game: t is feasible exactly when it ends up in the
    attack set of that game's equilibrium strategy."""
    if not 0 <= t < game.n:
        raise PreconditionError(f"target {t} outside 0..{game.n - 1}")
    modified = _with_preference_payoffs(game, t)
    result = Solver(modified, mode).sse()
    cov = coverage_of(modified, result.strategy)
    return t in attack_set(modified, cov)


# ---------- restricted-game path ----------

def ise_via_restricted_game(game: SecurityGame,
                            mode: str = "auto") -> EquilibriumResult:
    """Compute an ISE by solving an SSE on the restriction of the game to
    its inducible targets (schedules intersected with that target set).
    Requires a game without identical targets."""
    solver = Solver(game, mode)
    part = solver.inducible_elements()
    if any(len(e.targets) > 1 for e in part.elements):
        raise PreconditionError(
            "restricted-game path requires a game without identical targets")
    keep = sorted(t for e in part.elements if e.inducible for t in e.targets)
    if not keep:
        raise InternalInvariantError(
            "no target is inducible; the guarantee is undefined here")
    new_index = {t: i for i, t in enumerate(keep)}

    sub_schedules: list[frozenset[int]] = []
    sub_of: list[Optional[int]] = []
    seen: dict[frozenset[int], int] = {}
    for s in game.schedules:
        inter = frozenset(new_index[t] for t in s if t in new_index)
        if not inter:
            sub_of.append(None)
            continue
        if inter not in seen:
            seen[inter] = len(sub_schedules)
            sub_schedules.append(inter)
        sub_of.append(seen[inter])

    sub_pools = []
    preimage: list[dict[int, int]] = []  # per resource: sub index -> original
    for pool in game.resources:
        mapping: dict[int, int] = {}
        for s in sorted(pool):
            idx = sub_of[s]
            if idx is not None and idx not in mapping:
                mapping[idx] = s
        preimage.append(mapping)
        sub_pools.append(frozenset(mapping))

    sub_payoffs = PayoffTable(tuple(game.payoffs[t] for t in keep))
    sub_game = SecurityGame(len(keep), sub_payoffs, tuple(sub_schedules),
                            tuple(sub_pools))
    sub_result = Solver(sub_game, mode).sse()

    support = {}
    for js, p in sub_result.strategy.support:
        assignment = [None if a is None else preimage[r][a]
                      for r, a in enumerate(js.assignment)]
        support[JointSchedule.build(game, assignment)] = p
    strategy = MixedStrategy.from_dict(support)
    attacked = keep[sub_result.attacked_target]
    guarantee = solver.utility_guarantee(strategy)
    return EquilibriumResult(
        concept="ISE",
        strategy=strategy,
        attacked_target=attacked,
        attacked_element=part.index_of(attacked),
        optimistic_value=sub_result.optimistic_value,
        guarantee=guarantee.value,
    )


# ---------- inducibility via payoff-scaling reduction ----------

def m1_bound(n: int, m0: int) -> int:
    """Denominator bound for basic solutions of the best-response
    polytopes: (n^2 * m0)^n."""
    _check_bound_args(n, m0)
    return (n * n * m0) ** n


def m2_bound(n: int, m0: int) -> int:
    """Vertex-magnitude bound 2(n+1)(n^2 m0)^(n^2) used to pick the payoff
    scale that turns a strict inducibility gap into a weak one."""
    _check_bound_args(n, m0)
    return 2 * (n + 1) * (n * n * m0) ** (n * n)


def _check_bound_args(n: int, m0: int) -> None:
    if not (isinstance(n, int) and isinstance(m0, int)):
        raise PreconditionError("bounds take integers")
    if n < 1 or m0 < 1:
        raise PreconditionError("bounds need n >= 1 and m0 >= 1")


def inducibility_via_reduction(game: SecurityGame, t: int,
                               digit_budget: int = 10_000,
                               mode: str = "auto") -> bool:
    """Decide inducibility of t by scaling all attacker payoffs by
    K = (n+1) * m2^2 and subtracting 1 on target t, then checking
    feasibility of t in the scaled game via the SSE route.  The scale makes
    the smallest representable strict gap survive as a weak one.

    Requires integer payoffs and no identical targets; refuses when K would
    exceed digit_budget decimal digits.
    """
    if not 0 <= t < game.n:
        raise PreconditionError(f"target {t} outside 0..{game.n - 1}")
    m0 = 1
    for v in range(game.n):
        p = game.payoffs[v]
        for x in (p.def_cov, p.def_unc, p.att_cov, p.att_unc):
            if x.denominator != 1:
                raise PreconditionError(
                    f"reduction requires integer payoffs; target {v} has {x}")
            m0 = max(m0, abs(int(x)))
    part = element_partition(game)
    if any(len(e.targets) > 1 for e in part.elements):
        raise PreconditionError(
            "reduction requires a game without identical targets")

    n = game.n
    # digits of K = (n+1) * m2^2, estimated before building the number
    log10_m2 = math.log10(2 * (n + 1)) + n * n * math.log10(n * n * m0)
    log10_k = math.log10(n + 1) + 2 * log10_m2
    if log10_k + 1 > digit_budget:
        raise GuardError(
            f"scaled payoffs would need about {int(log10_k) + 1} digits, "
            f"over the budget of {digit_budget}")
    scale = Fraction((n + 1) * m2_bound(n, m0) ** 2)

    rows = []
    for v in range(game.n):
        p = game.payoffs[v]
        delta = ONE if v == t else ZERO
        rows.append(TargetPayoffs(p.def_cov, p.def_unc,
                                  scale * p.att_cov - delta,
                                  scale * p.att_unc - delta))
    scaled = SecurityGame(game.n, PayoffTable(tuple(rows)), game.schedules,
                          game.resources)
    return feasible_target_via_sse(scaled, t, mode)
