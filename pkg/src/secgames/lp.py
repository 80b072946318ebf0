"""Exact linear programming over rationals.

A dense-tableau, two-phase primal simplex.  The entering column is normally
the one with the largest reduced cost (lowest index on ties); after a run of
degenerate pivots the rule switches to Bland's until the objective strictly
improves again.  Termination still holds: strict improvements are finitely
many, so a non-terminating run would eventually pivot degenerately forever,
re-arm Bland's rule for good, and Bland's rule cannot cycle.  The leaving
row breaks ratio ties by the lowest basis-variable index.  The pivot
sequence is therefore a deterministic function of the program.

Every tableau row is stored as a vector of integers plus one positive
denominator shared by the whole row; pivots use two-term integer updates and
a gcd pass, so no floating point ever appears and no tolerance is needed
anywhere.  Statuses are exact: Optimal means proven optimal, Infeasible means
a phase-1 certificate, Unbounded means an unbounded ray was found.

Every Optimal solve re-verifies itself before returning: exact primal
feasibility (original rows and bounds), dual feasibility, complementary
slackness, and strong duality on the internal standard form.  A failure
raises InternalInvariantError; the check cannot be disabled, and the
module-level `stats` counters let a test suite confirm the checks ran.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .errors import InternalInvariantError

# Safety valve against implementation bugs; Bland's rule cannot cycle, so
# hitting this means something is broken.
PIVOT_CAP = 2_000_000

# Consecutive degenerate pivots tolerated before engaging Bland's rule.
STALL_LIMIT = 50

ZERO = Fraction(0)
ONE = Fraction(1)

# Counters over the process lifetime; the acceptance suite reports them.
stats = {"solves": 0, "optimal": 0, "infeasible": 0, "unbounded": 0,
         "pivots": 0, "self_checks": 0}


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpSolution:
    """Outcome of a solve.

    `primal` aligns with the program's variables and `duals` with its rows.
    For a max program the duals y satisfy, at optimality, the pricing
    identity: a candidate column with objective coefficient c and row
    coefficients a has reduced cost c - y.a, and every variable column
    already present prices out <= 0 (for min programs, >= 0).
    """
    status: LpStatus
    objective: Fraction | None
    primal: tuple[Fraction, ...] | None
    duals: tuple[Fraction, ...] | None


class LinearProgram:
    """Mutable LP builder.

    Variables default to lower bound 0 and no upper bound; pass lower=None
    for a free variable.  Rows are <=, >= or = with exact rational data.
    """

    def __init__(self, sense: str = "max") -> None:
        if sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
        self.sense = sense
        self.obj: list[Fraction] = []
        self.lower: list[Fraction | None] = []
        self.upper: list[Fraction | None] = []
        self.rows: list[list[Fraction]] = []
        self.rels: list[str] = []
        self.rhs: list[Fraction] = []

    @property
    def num_vars(self) -> int:
        return len(self.obj)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_variable(self, obj: Fraction | int = 0,
                     lower: Fraction | int | None = 0,
                     upper: Fraction | int | None = None) -> int:
        idx = len(self.obj)
        self.obj.append(Fraction(obj))
        self.lower.append(None if lower is None else Fraction(lower))
        self.upper.append(None if upper is None else Fraction(upper))
        for row in self.rows:
            row.append(ZERO)
        return idx

    def add_row(self, coeffs: Sequence[Fraction | int] | Mapping[int, Fraction | int],
                rel: str, rhs: Fraction | int) -> int:
        if rel == "==":
            rel = "="
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"relation must be <=, >= or =, got {rel!r}")
        dense = [ZERO] * self.num_vars
        if isinstance(coeffs, Mapping):
            for k, v in coeffs.items():
                dense[k] = Fraction(v)
        else:
            if len(coeffs) > self.num_vars:
                raise ValueError("row longer than variable count")
            for k, v in enumerate(coeffs):
                dense[k] = Fraction(v)
        self.rows.append(dense)
        self.rels.append(rel)
        self.rhs.append(Fraction(rhs))
        return len(self.rows) - 1

    def add_column(self, obj: Fraction | int,
                   coeffs: Sequence[Fraction | int]) -> int:
        """Append a variable (bounds 0..inf) with one coefficient per
        existing row.  Existing solutions stay feasible: the new variable
        enters at value 0, so a previously optimal basis remains a valid
        warm start for the extended program."""
        if len(coeffs) != self.num_rows:
            raise ValueError(
                f"column has {len(coeffs)} coefficients for {self.num_rows} rows")
        idx = self.add_variable(obj=obj)
        for row, c in zip(self.rows, coeffs):
            row[idx] = Fraction(c)
        return idx

    def solve(self) -> LpSolution:
        return solve(self)


def solve(lp: LinearProgram) -> LpSolution:
    stats["solves"] += 1
    sol = _Simplex(lp).run()
    if sol.status is LpStatus.OPTIMAL:
        stats["optimal"] += 1
    else:
        stats[sol.status.value] += 1
    return sol


def _row_gcd_reduce(nums: list[int], den: int) -> tuple[list[int], int]:
    if den == 1:
        return nums, den
    g = gcd(den, *nums)
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    return nums, den


def _int_scale(values: Sequence[Fraction], extra: Fraction | None = None
               ) -> tuple[list[int], int, int | None]:
    """Clear denominators: returns (numerators, common denominator, scaled
    extra).  Pure integer arithmetic once the denominators are read."""
    den = 1
    for v in values:
        d = v.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    if extra is not None:
        d = extra.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    if den == 1:
        nums = [v.numerator for v in values]
        e = extra.numerator if extra is not None else None
    else:
        nums = [v.numerator * (den // v.denominator) for v in values]
        e = (extra.numerator * (den // extra.denominator)
             if extra is not None else None)
    return nums, den, e


class _Simplex:
    """One solve: build the standard form, run both phases, extract and
    verify the solution."""

    def __init__(self, lp: LinearProgram) -> None:
        self.lp = lp
        self.sf = 1 if lp.sense == "max" else -1
        self.bland = False

    # ---------- standard form construction ----------

    def _build(self) -> None:
        lp = self.lp
        # Each original variable x maps to shift + sum(sign * std var);
        # two-sided bounds add an explicit <= row on the shifted variable.
        self.shift: list[Fraction] = []
        self.terms: list[list[tuple[int, int]]] = []
        bound_rows: list[tuple[int, Fraction]] = []
        ns = 0
        for k in range(lp.num_vars):
            lo, up = lp.lower[k], lp.upper[k]
            if lo is not None:
                self.shift.append(lo)
                self.terms.append([(ns, 1)])
                if up is not None:
                    bound_rows.append((ns, up - lo))
                ns += 1
            elif up is not None:
                self.shift.append(up)
                self.terms.append([(ns, -1)])
                ns += 1
            else:
                self.shift.append(ZERO)
                self.terms.append([(ns, 1), (ns + 1, -1)])
                ns += 2
        self.ns = ns

        # Standard objective over std vars, max orientation.  Each variable
        # owns its std columns exclusively, so plain assignment suffices.
        c_std = [ZERO] * ns
        for k in range(lp.num_vars):
            ck = lp.obj[k] * self.sf
            if ck:
                for j, sg in self.terms[k]:
                    c_std[j] = ck if sg == 1 else -ck
        self.c_std = c_std
        self.obj_shift = sum((lp.obj[k] * self.sf * self.shift[k]
                              for k in range(lp.num_vars)), ZERO)

        # Rows over std vars; original rows first, then bound rows.
        raw_rows: list[list[Fraction]] = []
        raw_rels: list[str] = []
        raw_rhs: list[Fraction] = []
        for i in range(lp.num_rows):
            dense = [ZERO] * ns
            shift_part = ZERO
            for k, coef in enumerate(lp.rows[i]):
                if coef:
                    if self.shift[k]:
                        shift_part += coef * self.shift[k]
                    for j, sg in self.terms[k]:
                        dense[j] = coef if sg == 1 else -coef
            raw_rows.append(dense)
            raw_rels.append(lp.rels[i])
            raw_rhs.append(lp.rhs[i] - shift_part)
        for j, ub in bound_rows:
            dense = [ZERO] * ns
            dense[j] = ONE
            raw_rows.append(dense)
            raw_rels.append("<=")
            raw_rhs.append(ub)
        self.m0 = lp.num_rows
        m = len(raw_rows)

        # Orient every row to a nonnegative right-hand side.  A >= row with
        # zero right-hand side also flips to <=, so its slack can start
        # basic (at zero) and no artificial variable is needed.
        self.row_sign = [1] * m
        for i in range(m):
            if raw_rhs[i] < 0:
                raw_rows[i] = [-v for v in raw_rows[i]]
                raw_rhs[i] = -raw_rhs[i]
                self.row_sign[i] = -1
                if raw_rels[i] == "<=":
                    raw_rels[i] = ">="
                elif raw_rels[i] == ">=":
                    raw_rels[i] = "<="
            elif raw_rels[i] == ">=" and raw_rhs[i] == 0:
                raw_rows[i] = [-v for v in raw_rows[i]]
                raw_rels[i] = "<="
                self.row_sign[i] = -1

        # Column layout: structural, slack/surplus, artificial.
        ncols = ns
        slack_col: list[int | None] = [None] * m
        for i in range(m):
            if raw_rels[i] != "=":
                slack_col[i] = ncols
                ncols += 1
        art_col: list[int | None] = [None] * m
        for i in range(m):
            if raw_rels[i] != "<=":
                art_col[i] = ncols
                ncols += 1
        self.ncols = ncols
        self.slack_col = slack_col
        self.art_col = art_col
        self.is_artificial = [False] * ncols
        for col in art_col:
            if col is not None:
                self.is_artificial[col] = True

        # Integer tableau rows: [coefficients..., rhs], one positive
        # denominator per row (1 right after clearing input denominators).
        tableau: list[list[int]] = []
        self.dens: list[int] = []
        basis: list[int] = []
        for i in range(m):
            scaled, den, srhs = _int_scale(raw_rows[i], raw_rhs[i])
            nums = scaled + [0] * (ncols - ns + 1)
            if slack_col[i] is not None:
                nums[slack_col[i]] = den if raw_rels[i] == "<=" else -den
            if art_col[i] is not None:
                nums[art_col[i]] = den
            nums[ncols] = srhs
            nums, den = _row_gcd_reduce(nums, den)
            tableau.append(nums)
            self.dens.append(den)
            basis.append(art_col[i] if art_col[i] is not None else slack_col[i])
        self.tab = tableau
        self.basis = basis
        self.m = m

        # Pristine copy for the self-check.
        self.pristine = [list(r) for r in tableau]
        self.pristine_dens = list(self.dens)

        # Phase-2 reduced-cost row: the initial basis (slacks/artificials)
        # has zero cost, so it starts as the objective itself.
        scaled, den, _ = _int_scale(c_std)
        self.z2 = scaled + [0] * (ncols - ns + 1)
        self.z2_den = den
        # Pristine copy of the scaled objective for the self-check.
        self.z0 = list(self.z2)
        self.z0_den = den

        # Phase-1 reduced-cost row (cost -1 per artificial): c1 plus the sum
        # of the artificial-basic rows.
        art_rows = [i for i in range(m) if art_col[i] is not None]
        self.has_phase1 = bool(art_rows)
        if self.has_phase1:
            den1 = 1
            for i in art_rows:
                den1 = den1 * self.dens[i] // gcd(den1, self.dens[i])
            z1 = [0] * (ncols + 1)
            for i in art_rows:
                f = den1 // self.dens[i]
                row = tableau[i]
                for j in range(ncols + 1):
                    if row[j]:
                        z1[j] += row[j] * f
            for i in art_rows:
                z1[art_col[i]] -= den1
            z1, den1 = _row_gcd_reduce(z1, den1)
            self.z1: list[int] | None = z1
            self.z1_den = den1
        else:
            self.z1 = None
            self.z1_den = 1

    # ---------- pivoting ----------

    def _pivot(self, p: int, q: int) -> None:
        stats["pivots"] += 1
        row = self.tab[p]
        piv = row[q]
        if piv == 0:
            raise InternalInvariantError("pivot on zero element")
        if piv < 0:
            row = [-v for v in row]
            piv = -piv
        unums, uden = _row_gcd_reduce(row, piv)
        self.tab[p] = unums
        self.dens[p] = uden
        self.basis[p] = q

        for i in range(self.m):
            if i != p:
                self.tab[i], self.dens[i] = self._eliminate_row(
                    self.tab[i], self.dens[i], q, unums, uden)
        self.z2, self.z2_den = self._eliminate_row(
            self.z2, self.z2_den, q, unums, uden)
        if self.z1 is not None:
            self.z1, self.z1_den = self._eliminate_row(
                self.z1, self.z1_den, q, unums, uden)

    @staticmethod
    def _eliminate_row(wnums: list[int], wden: int, q: int,
                       unums: list[int], uden: int) -> tuple[list[int], int]:
        wq = wnums[q]
        if wq == 0:
            return wnums, wden
        new = [wn * uden - wq * un for wn, un in zip(wnums, unums)]
        return _row_gcd_reduce(new, wden * uden)

    def _entering(self, znums: list[int], phase2: bool) -> int | None:
        is_art = self.is_artificial
        if self.bland:
            for j in range(self.ncols):
                if phase2 and is_art[j]:
                    continue
                if znums[j] > 0:
                    return j
            return None
        # largest reduced cost, lowest index on ties (one shared row
        # denominator, so the raw numerators compare directly)
        best = None
        best_v = 0
        for j in range(self.ncols):
            if phase2 and is_art[j]:
                continue
            v = znums[j]
            if v > best_v:
                best_v = v
                best = j
        return best

    def _leaving(self, q: int) -> int | None:
        best = None
        rhs = self.ncols
        for i in range(self.m):
            a = self.tab[i][q]
            if a > 0:
                if best is None:
                    best = i
                else:
                    left = self.tab[i][rhs] * self.tab[best][q]
                    right = self.tab[best][rhs] * a
                    if left < right or (left == right
                                        and self.basis[i] < self.basis[best]):
                        best = i
        return best

    def _infeasible_artificials(self) -> bool:
        rhs = self.ncols
        for i in range(self.m):
            if self.is_artificial[self.basis[i]] and self.tab[i][rhs]:
                return True
        return False

    def _phase(self, phase2: bool) -> str:
        count = 0
        rhs = self.ncols
        stall = 0
        while True:
            if not phase2 and not self._infeasible_artificials():
                return "feasible"
            znums = self.z2 if phase2 else self.z1
            q = self._entering(znums, phase2)
            if q is None:
                return "optimal"
            p = self._leaving(q)
            if p is None:
                if not phase2:
                    raise InternalInvariantError("phase 1 cannot be unbounded")
                return "unbounded"
            degenerate = self.tab[p][rhs] == 0
            self._pivot(p, q)
            if degenerate:
                stall += 1
                if stall > STALL_LIMIT:
                    self.bland = True
            else:
                # strict objective progress; safe to leave Bland's rule
                # (should pivoting stall again, the counter re-arms it, and
                # a solve with no further progress stays in Bland's rule,
                # which terminates)
                stall = 0
                self.bland = False
            count += 1
            if count > PIVOT_CAP:
                raise InternalInvariantError(
                    "pivot cap exceeded; Bland's rule should terminate")

    # ---------- main driver ----------

    def run(self) -> LpSolution:
        self._build()
        if self.has_phase1:
            outcome = self._phase(phase2=False)
            if outcome == "optimal" and self._infeasible_artificials():
                return LpSolution(LpStatus.INFEASIBLE, None, None, None)
            # Drive basic artificials (all at value zero now) out of the
            # basis where possible.  A row that resists is redundant and
            # harmless: it is all-zero across non-artificial columns, so no
            # later pivot can move its artificial off zero.
            for i in range(self.m):
                if self.is_artificial[self.basis[i]]:
                    row = self.tab[i]
                    for j in range(self.ncols):
                        if not self.is_artificial[j] and row[j] != 0:
                            self._pivot(i, j)
                            break
            self.z1 = None
        if self._phase(phase2=True) == "unbounded":
            return LpSolution(LpStatus.UNBOUNDED, None, None, None)
        return self._extract()

    # ---------- extraction and exact verification ----------

    def _identity_col(self, i: int) -> int:
        col = self.art_col[i]
        return col if col is not None else self.slack_col[i]

    def _extract(self) -> LpSolution:
        rhs = self.ncols
        x_std = [ZERO] * self.ncols
        for i in range(self.m):
            x_std[self.basis[i]] = Fraction(self.tab[i][rhs], self.dens[i])

        lp = self.lp
        primal = []
        for k in range(lp.num_vars):
            v = self.shift[k]
            for j, sg in self.terms[k]:
                if x_std[j]:
                    v += sg * x_std[j]
            primal.append(v)
        objective = sum((lp.obj[k] * primal[k]
                         for k in range(lp.num_vars) if lp.obj[k]), ZERO)

        # Internal duals from the reduced cost of each row's identity column
        # (zero phase-2 cost): y_i = -rc(identity_i).
        y_int = [Fraction(-self.z2[self._identity_col(i)], self.z2_den)
                 for i in range(self.m)]
        duals = tuple(self.sf * self.row_sign[i] * y_int[i]
                      for i in range(self.m0))

        self._self_check(x_std, primal, objective, y_int)
        return LpSolution(LpStatus.OPTIMAL, objective, tuple(primal), duals)

    def _self_check(self, x_std: list[Fraction], primal: list[Fraction],
                    objective: Fraction, y_int: list[Fraction]) -> None:
        stats["self_checks"] += 1
        lp = self.lp
        rhs = self.ncols
        ncols = self.ncols

        # The heavy parts run in pure integers: x, y and all row data are
        # rescaled onto common denominators once up front.
        xd = 1
        for v in x_std:
            d = v.denominator
            if d != 1:
                xd = xd * d // gcd(xd, d)
        xs = [v.numerator * (xd // v.denominator) for v in x_std]
        pd = 1
        for d in self.pristine_dens:
            if d != 1:
                pd = pd * d // gcd(pd, d)
        rowmul = [pd // d for d in self.pristine_dens]
        yn = [-self.z2[self._identity_col(i)] for i in range(self.m)]
        # y_int[i] must equal yn[i] / z2_den by construction
        for i in range(self.m):
            if y_int[i] * self.z2_den != yn[i]:
                raise InternalInvariantError("dual extraction inconsistent")

        # (1) exact primal feasibility on the pristine standard form.  Rows
        # are integer-scaled, so the denominators cancel.
        for j, v in enumerate(xs):
            if v < 0:
                raise InternalInvariantError(f"negative standard variable {j}")
        for i in range(self.m):
            nums = self.pristine[i]
            acc = sum(nums[j] * xs[j] for j in range(ncols) if nums[j])
            if acc != nums[rhs] * xd:
                raise InternalInvariantError(
                    f"standard row {i} not satisfied exactly")

        # (2) exact primal feasibility on the original program.
        for k in range(lp.num_vars):
            lo, up = lp.lower[k], lp.upper[k]
            if lo is not None and primal[k] < lo:
                raise InternalInvariantError(f"variable {k} below lower bound")
            if up is not None and primal[k] > up:
                raise InternalInvariantError(f"variable {k} above upper bound")
        for i in range(lp.num_rows):
            row = lp.rows[i]
            acc = sum((row[k] * primal[k]
                       for k in range(lp.num_vars) if primal[k] and row[k]),
                      ZERO)
            rel, b = lp.rels[i], lp.rhs[i]
            ok = acc <= b if rel == "<=" else acc >= b if rel == ">=" else acc == b
            if not ok:
                raise InternalInvariantError(
                    f"original row {i} violated: {acc} {rel} {b}")

        # (3) objective consistency between the orientations.
        z0, z0d = self.z0, self.z0_den
        cx_num = sum(z0[j] * xs[j] for j in range(self.ns) if z0[j])
        cstd_x = Fraction(cx_num, z0d * xd)
        if cstd_x + self.obj_shift != self.sf * objective:
            raise InternalInvariantError("objective mismatch across forms")

        # (4) strong duality on the standard form: c.x == y.b.
        yb_num = sum(yn[i] * self.pristine[i][rhs] * rowmul[i]
                     for i in range(self.m) if yn[i])
        if cx_num * (self.z2_den * pd) != yb_num * (z0d * xd):
            raise InternalInvariantError(
                f"strong duality failed: primal {cstd_x}")

        # (5) dual feasibility + complementary slackness over every
        # non-artificial standard column.  rc(j) = c_j - y.A_j with
        # c_j = z0[j]/z0d and y.A_j = ya[j]/(z2_den*pd).
        ya = [0] * ncols
        for i in range(self.m):
            if yn[i]:
                f = yn[i] * rowmul[i]
                row = self.pristine[i]
                for j in range(ncols):
                    if row[j]:
                        ya[j] += f * row[j]
        lscale = self.z2_den * pd
        rscale = z0d
        for j in range(ncols):
            if self.is_artificial[j]:
                continue
            lhs = z0[j] * lscale
            rv = ya[j] * rscale
            if lhs > rv:
                raise InternalInvariantError(
                    f"dual infeasibility at column {j}: "
                    f"rc={Fraction(lhs - rv, z0d * lscale)}")
            if xs[j] > 0 and lhs != rv:
                raise InternalInvariantError(
                    f"complementary slackness failed at column {j}")
