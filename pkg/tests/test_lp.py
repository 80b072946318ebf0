"""Exact simplex engine: known optima, statuses, duals, self-checks."""

import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog

from secgames import lp
from secgames.errors import InternalInvariantError
from secgames.lp import LinearProgram, LpStatus, solve

F = Fraction


def _program(sense, obj, rows, lower=None):
    p = LinearProgram(sense)
    for j, c in enumerate(obj):
        p.add_variable(obj=c, lower=None if lower and j in lower else 0)
    for coeffs, rel, rhs in rows:
        p.add_row(coeffs, rel, rhs)
    return p


def test_basic_max():
    p = _program("max", [3, 2], [([1, 1], "<=", 4), ([1, 0], "<=", 2)])
    s = solve(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.objective == 10
    assert s.primal == (F(2), F(2))
    assert s.duals == (F(2), F(1))


def test_basic_min():
    p = _program("min", [1, 1], [([1, 2], ">=", 3), ([2, 1], ">=", 3)])
    s = solve(p)
    assert s.objective == 2
    assert s.primal == (F(1), F(1))


def test_equality_row():
    p = _program("max", [1, 0], [([1, 1], "=", 5), ([0, 1], ">=", 1)])
    s = solve(p)
    assert s.objective == 4
    assert s.primal == (F(4), F(1))


def test_no_rows_and_upper_bound():
    p = LinearProgram("max")
    p.add_variable(obj=-1)
    assert solve(p).objective == 0
    q = LinearProgram("max")
    q.add_variable(obj=1, upper=3)
    q.add_row([1], "<=", 10)
    assert solve(q).objective == 3


def test_infeasible():
    p = _program("max", [1], [([1], "<=", -1)])
    s = solve(p)
    assert s.status is LpStatus.INFEASIBLE
    assert s.objective is None and s.primal is None


def test_unbounded():
    p = _program("max", [1], [([1], ">=", 1)])
    assert solve(p).status is LpStatus.UNBOUNDED


def test_free_variable():
    p = LinearProgram("max")
    p.add_variable(obj=1, lower=None)
    p.add_row([1], "<=", 7)
    assert solve(p).objective == 7
    q = LinearProgram("min")
    q.add_variable(obj=1, lower=None)
    q.add_row([1], "<=", 7)
    assert solve(q).status is LpStatus.UNBOUNDED


def test_free_variable_negative_optimum():
    p = LinearProgram("max")
    p.add_variable(obj=1, lower=None)
    p.add_row([1], "<=", -4)
    s = solve(p)
    assert s.objective == -4
    assert s.primal == (F(-4),)


def test_zero_rhs_ge_rows():
    # rows of the form a.x >= 0 take a dedicated no-artificial path
    p = _program("max", [1, 1],
                 [([1, -1], ">=", 0), ([-2, 1], ">=", 0), ([1, 1], "<=", 1)])
    s = solve(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.objective == 0
    assert s.primal == (F(0), F(0))


def test_dual_sign_on_inactive_ge_row():
    p = _program("max", [2], [([1], ">=", 1), ([1], "<=", 3)])
    s = solve(p)
    assert s.objective == 6
    assert s.duals == (F(0), F(2))


def test_beale_degenerate_program():
    # classic cycling stressor for largest-coefficient pivoting
    p = _program("min", [F(-3, 4), 150, F(-1, 50), 6],
                 [([F(1, 4), -60, F(-1, 25), 9], "<=", 0),
                  ([F(1, 2), -90, F(-1, 50), 3], "<=", 0),
                  ([0, 0, 1, 0], "<=", 1)])
    s = solve(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.objective == F(-1, 20)
    assert s.primal == (F(1, 25), F(0), F(1), F(0))


def test_duals_price_columns():
    p = _program("max", [5, 4, 3],
                 [([2, 3, 1], "<=", 5), ([4, 1, 2], "<=", 11),
                  ([3, 4, 2], "<=", 8)])
    s = solve(p)
    assert s.objective == 13
    # every present column prices out nonpositive against the duals, and
    # slack complements: positive dual rows are tight
    for j in range(p.num_vars):
        rc = p.obj[j] - sum(y * p.rows[i][j] for i, y in enumerate(s.duals))
        assert rc <= 0
        if s.primal[j] > 0:
            assert rc == 0
    for i, y in enumerate(s.duals):
        lhs = sum(c * x for c, x in zip(p.rows[i], s.primal))
        assert y >= 0
        if y > 0:
            assert lhs == p.rhs[i]


def test_builder_validation():
    with pytest.raises(ValueError):
        LinearProgram("maximize")
    p = LinearProgram("max")
    p.add_variable(obj=1)
    with pytest.raises(ValueError):
        p.add_row([1], "<", 0)
    with pytest.raises(ValueError):
        p.add_row([1, 2], "<=", 0)


def test_add_column_aligns_rows():
    p = LinearProgram("max")
    p.add_variable(obj=1)
    p.add_row([1], "<=", 4)
    p.add_row([2], "<=", 6)
    p.add_column(obj=2, coeffs=[1, 3])
    s = solve(p)
    assert s.objective == 4
    assert s.primal == (F(0), F(2))
    with pytest.raises(ValueError):
        p.add_column(obj=1, coeffs=[1])


def test_stats_count_self_checks():
    before = dict(lp.stats)
    p = _program("max", [1], [([1], "<=", 2)])
    solve(p)
    assert lp.stats["solves"] == before["solves"] + 1
    assert lp.stats["optimal"] == before["optimal"] + 1
    assert lp.stats["self_checks"] == before["self_checks"] + 1


def test_matches_float_solver_on_random_programs():
    rng = random.Random(20240817)
    statuses = {LpStatus.OPTIMAL: 0, LpStatus.INFEASIBLE: 0,
                LpStatus.UNBOUNDED: 0}
    for _ in range(60):
        nv = rng.randint(2, 5)
        nr = rng.randint(2, 5)
        obj = [rng.randint(-5, 5) for _ in range(nv)]
        rows = []
        for _ in range(nr):
            coeffs = [rng.randint(-4, 4) for _ in range(nv)]
            rel = rng.choice(["<=", ">=", "="])
            rows.append((coeffs, rel, rng.randint(-3, 8)))
        p = _program("max", obj, rows)
        s = solve(p)
        statuses[s.status] += 1

        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for coeffs, rel, rhs in rows:
            if rel == "<=":
                a_ub.append(coeffs), b_ub.append(rhs)
            elif rel == ">=":
                a_ub.append([-c for c in coeffs]), b_ub.append(-rhs)
            else:
                a_eq.append(coeffs), b_eq.append(rhs)
        ref = linprog([-c for c in obj], A_ub=a_ub or None,
                      b_ub=b_ub or None, A_eq=a_eq or None,
                      b_eq=b_eq or None, bounds=[(0, None)] * nv,
                      method="highs")
        expected = {0: LpStatus.OPTIMAL, 2: LpStatus.INFEASIBLE,
                    3: LpStatus.UNBOUNDED}[ref.status]
        assert s.status is expected
        if s.status is LpStatus.OPTIMAL:
            assert abs(float(s.objective) + ref.fun) <= 1e-7 * (
                1 + abs(ref.fun))
    # the draw actually exercises all three verdicts
    assert all(statuses.values())
