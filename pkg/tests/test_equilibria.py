"""Solver tests: frozen values on the four-target fixture, a grid oracle for
the per-target optima, cross-mode agreement, ordering properties, and the
error contracts."""

from fractions import Fraction
from itertools import product

import pytest

from secgames.equilibria import (EquilibriumResult, GuaranteeReport, Solver,
                                 assignment_key, feasible_target_via_sse,
                                 inducibility_via_reduction,
                                 ise_via_restricted_game, m1_bound, m2_bound)
from secgames.errors import (GuardError, InternalInvariantError,
                             InvalidStrategyError, PreconditionError)
from secgames.game import (JointSchedule, MixedStrategy, attacker_utility,
                           coverage_of, defender_utility)
from secgames.instances import (GeneratorConfig, SplitMix64, random_game,
                                random_strategy)
from conftest import build_example_game, half_half, nine_fourteen

F = Fraction

MODES = ("enumerate", "cg")


# ---------- frozen regression values on the fixture ----------

@pytest.mark.parametrize("mode", MODES)
def test_sse_fixture(mode):
    game = build_example_game()
    r = Solver(game, mode).sse()
    assert r.concept == "SSE"
    assert r.attacked_target == 1
    assert r.attacked_element == 1
    assert r.optimistic_value == F(50)
    assert r.guarantee == F(0)
    probs = {assignment_key(js): p for js, p in r.strategy.support}
    assert probs == {"0": F(1, 2), "1": F(1, 2)}


@pytest.mark.parametrize("mode", MODES)
def test_ise_fixture(mode):
    game = build_example_game()
    r = Solver(game, mode).ise()
    assert r.concept == "ISE"
    assert r.attacked_target == 3
    assert r.attacked_element == 3
    assert r.optimistic_value == F(123, 14)
    assert r.guarantee == F(123, 14)
    probs = {assignment_key(js): p for js, p in r.strategy.support}
    assert probs == {"0": F(9, 14), "1": F(5, 14)}


@pytest.mark.parametrize("mode", MODES)
def test_fixture_inducibility(mode):
    game = build_example_game()
    s = Solver(game, mode)
    part = s.inducible_elements()
    assert tuple(e.inducible for e in part.elements) == (True, False, True, True)
    assert tuple(s.inducible_target(t)[0] for t in range(4)) == \
        (True, False, True, True)
    assert all(s.feasible_target(t) for t in range(4))
    for t in (0, 2, 3):
        ok, witness = s.inducible_target(t)
        assert ok
        cov = coverage_of(game, witness)
        ua_t = attacker_utility(game, cov, t)
        assert all(ua_t > attacker_utility(game, cov, v)
                   for v in range(4) if v != t)


@pytest.mark.parametrize("mode", MODES)
def test_fixture_guarantees(mode):
    game = build_example_game()
    s = Solver(game, mode)
    g = s.utility_guarantee(half_half(game))
    assert g.value == F(0)
    assert g.witness_element == 0
    assert not g.degenerate
    g2 = s.utility_guarantee(nine_fourteen(game))
    assert g2.value == F(123, 14)
    assert g2.witness_element == 3
    assert not g2.degenerate


@pytest.mark.parametrize("mode", MODES)
def test_fixture_judgments(mode):
    game = build_example_game()
    s = Solver(game, mode)
    assert s.sse_overoptimistic() is True
    assert s.sse_suboptimal() is True


def test_full_coverage_guarantee():
    game = build_example_game()
    s = Solver(game)
    all_big = MixedStrategy(((JointSchedule.build(game, (0,)), F(1)),))
    cov = coverage_of(game, all_big)
    # coverage (1,1,1,0): attacker sees (-1,-2,-3,4) so target 3 dominates
    g = s.utility_guarantee(all_big)
    assert g.witness_element == 3
    assert g.value == defender_utility(game, cov, 3)
    assert not g.degenerate


def _inseparable_pair_game():
    """Two targets with equal attacker payoffs whose covering-schedule sets
    differ only through schedules no resource can take, so they sit in
    different elements yet share coverage under every strategy.  Neither
    element is ever a unique best response."""
    from secgames.game import PayoffTable, SecurityGame, TargetPayoffs
    payoffs = PayoffTable((
        TargetPayoffs(F(3), F(-1), F(-1), F(2)),
        TargetPayoffs(F(1), F(-2), F(-1), F(2)),
    ))
    schedules = (frozenset({0}), frozenset({1}), frozenset({0, 1}))
    return SecurityGame(2, payoffs, schedules, (frozenset({2}),))


def test_degenerate_guarantee():
    game = _inseparable_pair_game()
    s = Solver(game)
    assert len(s.partition.elements) == 2
    assert not s.inducible_target(0)[0]
    assert not s.inducible_target(1)[0]
    both = MixedStrategy(((JointSchedule.build(game, (2,)), F(1)),))
    g = s.utility_guarantee(both)
    assert g.degenerate
    assert g.witness_element is None
    assert g.value == F(1)  # weak tie-break at full coverage picks target 1


# ---------- grid oracle for the per-target optima ----------

def _grid_best(game, t, denom):
    """Exact best defender value for target t over the probability grid with
    the given denominator, keeping t weakly optimal; None when no grid point
    qualifies.  The fixture has three joint schedules (empty, {0,1,2}, {3})."""
    best = None
    for a in range(denom + 1):
        for b in range(denom + 1 - a):
            p1, p2 = F(a, denom), F(b, denom)
            cov = (p1, p1, p1, p2)
            ua = [attacker_utility(game, cov, v) for v in range(4)]
            if any(ua[v] > ua[t] for v in range(4) if v != t):
                continue
            v = defender_utility(game, cov, t)
            if best is None or v > best:
                best = v
    return best


@pytest.mark.parametrize("mode", MODES)
def test_per_target_values_match_grid(mode):
    """The four per-target optima, frozen from an exact grid sweep: the grid
    denominator 126 is divisible by every optimum's denominator, so the LP
    value must be attained exactly on the grid."""
    game = build_example_game()
    s = Solver(game, mode)
    expected = (F(2, 7), F(50), F(0), F(123, 14))
    for t in range(4):
        out = s._sse_candidate(t)
        assert out is not None
        assert out.objective == expected[t]
    for t in range(4):
        assert _grid_best(game, t, 126) == expected[t]


# ---------- cross-mode agreement ----------

@pytest.mark.parametrize("seed", range(12))
def test_modes_agree(seed):
    cfg = GeneratorConfig(seed=seed, n=6, num_schedules=5, l=3, resources=2)
    game = random_game(cfg)
    a, b = Solver(game, "enumerate"), Solver(game, "cg")
    ra, rb = a.sse(), b.sse()
    assert ra.optimistic_value == rb.optimistic_value
    assert ra.attacked_target == rb.attacked_target
    assert ra.guarantee == rb.guarantee
    ia, ib = a.ise(), b.ise()
    assert ia.optimistic_value == ib.optimistic_value
    assert ia.attacked_element == ib.attacked_element
    flags_a = tuple(e.inducible for e in a.inducible_elements().elements)
    flags_b = tuple(e.inducible for e in b.inducible_elements().elements)
    assert flags_a == flags_b


def test_canonical_strategy_stable_across_modes():
    game = build_example_game()
    for solve in ("sse", "ise"):
        strat = [getattr(Solver(game, m), solve)().strategy for m in MODES]
        assert strat[0].support == strat[1].support


# ---------- ordering properties ----------

@pytest.mark.parametrize("seed", range(8))
def test_guarantee_ordering_chain(seed):
    """guarantee(sse strategy) <= ise guarantee <= sse optimistic value, and
    no sampled strategy beats the ise guarantee."""
    cfg = GeneratorConfig(seed=100 + seed, n=7, num_schedules=5, l=3,
                          resources=2)
    game = random_game(cfg)
    s = Solver(game)
    r, ri = s.sse(), s.ise()
    g = s.utility_guarantee(r.strategy)
    assert g.value <= ri.guarantee <= r.optimistic_value
    assert ri.guarantee == ri.optimistic_value
    rng = SplitMix64.substream(999, seed)
    for _ in range(10):
        x = random_strategy(game, rng)
        gx = s.utility_guarantee(x)
        if not gx.degenerate:
            assert gx.value <= ri.guarantee


@pytest.mark.parametrize("seed", range(8))
def test_ise_strategy_attains_its_guarantee(seed):
    cfg = GeneratorConfig(seed=200 + seed, n=6, num_schedules=4, l=3,
                          resources=2)
    game = random_game(cfg)
    s = Solver(game)
    ri = s.ise()
    g = s.utility_guarantee(ri.strategy)
    assert not g.degenerate
    assert g.value == ri.guarantee


# ---------- companion operations ----------

@pytest.mark.parametrize("mode", MODES)
def test_restricted_game_equivalence_fixture(mode):
    game = build_example_game()
    direct = Solver(game, mode).ise()
    via = ise_via_restricted_game(game, mode)
    assert via.optimistic_value == direct.optimistic_value
    assert via.guarantee == direct.guarantee
    assert via.attacked_target == direct.attacked_target
    probs = {assignment_key(js): p for js, p in via.strategy.support}
    assert probs == {"0": F(9, 14), "1": F(5, 14)}


@pytest.mark.parametrize("seed", range(8))
def test_restricted_game_equivalence_random(seed):
    cfg = GeneratorConfig(seed=300 + seed, n=6, num_schedules=5, l=3,
                          resources=2)
    game = random_game(cfg)
    s = Solver(game)
    if any(len(e.targets) > 1 for e in s.partition.elements):
        pytest.skip("identical targets present")
    direct = s.ise()
    via = ise_via_restricted_game(game)
    assert via.guarantee == direct.guarantee
    assert via.attacked_target == direct.attacked_target


@pytest.mark.parametrize("mode", MODES)
def test_feasible_target_via_sse_fixture(mode):
    game = build_example_game()
    s = Solver(game, mode)
    for t in range(4):
        assert feasible_target_via_sse(game, t, mode) == s.feasible_target(t)


def test_single_target_game():
    game = random_game(GeneratorConfig(seed=5, n=1, num_schedules=1, l=1,
                                       resources=1))
    s = Solver(game)
    assert s.feasible_target(0)
    ok, witness = s.inducible_target(0)
    assert ok and witness is not None
    r = s.sse()
    assert r.attacked_target == 0
    assert r.optimistic_value == game.payoffs[0].def_cov
    assert s.ise().guarantee == r.guarantee


# ---------- reduction bounds ----------

def test_m_bounds_frozen():
    assert m1_bound(2, 5) == 400
    assert m2_bound(2, 5) == 960000
    assert m2_bound(1, 1) == 4
    assert m2_bound(4, 5) == 2 * 5 * 80 ** 16


def test_m_bounds_reject_bad_args():
    with pytest.raises(PreconditionError):
        m1_bound(0, 5)
    with pytest.raises(PreconditionError):
        m2_bound(3, 0)
    with pytest.raises(PreconditionError):
        m1_bound(F(3, 2), 5)


def test_reduction_guard_trips():
    game = random_game(GeneratorConfig(seed=1, n=4, num_schedules=3, l=2,
                                       resources=1))
    with pytest.raises(GuardError):
        inducibility_via_reduction(game, 0, digit_budget=10)


def test_reduction_rejects_fractional_payoffs():
    base = build_example_game()
    from secgames.game import PayoffTable, SecurityGame, TargetPayoffs
    rows = list(base.payoffs)
    rows[0] = TargetPayoffs(F(1, 2), F(-1), F(-1), F(1))
    game = SecurityGame(base.n, PayoffTable(tuple(rows)), base.schedules,
                        base.resources)
    with pytest.raises(PreconditionError):
        inducibility_via_reduction(game, 0)


@pytest.mark.parametrize("seed", range(6))
def test_reduction_agrees_with_direct(seed):
    cfg = GeneratorConfig(seed=400 + seed, n=3, num_schedules=3, l=2,
                          resources=1, reward_range=(0, 3),
                          penalty_range=(-3, 0))
    game = random_game(cfg)
    s = Solver(game)
    if any(len(e.targets) > 1 for e in s.partition.elements):
        pytest.skip("identical targets present")
    for t in range(game.n):
        assert inducibility_via_reduction(game, t) == s.inducible_target(t)[0]


# ---------- error contracts ----------

def test_target_index_checked():
    game = build_example_game()
    s = Solver(game)
    with pytest.raises(PreconditionError):
        s.inducible_target(4)
    with pytest.raises(PreconditionError):
        s.feasible_target(-1)


def test_foreign_strategy_rejected():
    game = build_example_game()
    other = random_game(GeneratorConfig(seed=2, n=4, num_schedules=3, l=2,
                                        resources=2))
    s = Solver(game)
    foreign = random_strategy(other, SplitMix64(3))
    with pytest.raises(InvalidStrategyError):
        s.utility_guarantee(foreign)


def test_restricted_game_requires_distinct_targets():
    from secgames.game import PayoffTable, SecurityGame, TargetPayoffs
    # two indistinguishable targets: same attacker payoffs, same schedule sets
    p = TargetPayoffs(F(5), F(-1), F(-2), F(3))
    game = SecurityGame(
        2, PayoffTable((p, p)),
        (frozenset({0, 1}),),
        (frozenset({0}),))
    with pytest.raises(PreconditionError):
        ise_via_restricted_game(game)


def test_json_round_trip_shapes():
    game = build_example_game()
    s = Solver(game)
    d = s.sse().to_json_dict()
    assert d["concept"] == "SSE"
    assert d["attacked_target"] == 2  # 1-based in reports
    assert d["optimistic_value"]["exact"] == 50
    assert d["guarantee"]["exact"] == 0
    assert d["strategy"] == {"0": "1/2", "1": "1/2"}
    g = s.utility_guarantee(nine_fourteen(game)).to_json_dict()
    assert g["value"]["exact"] == "123/14"
    assert g["witness_element"] == 4
    assert g["degenerate"] is False
