"""Brute-force oracle tests: exact grid values on the fixture, one-sided
consistency with the LP path, and the perturbation probe's envelope."""

from fractions import Fraction

import pytest

from secgames.equilibria import Solver
from secgames.errors import GuardError, PreconditionError
from secgames.game import MixedStrategy, JointSchedule
from secgames.instances import GeneratorConfig, random_game
from secgames.oracle import (guarantee_by_perturbation, inducible_brute,
                             ise_brute)
from conftest import build_example_game, half_half, nine_fourteen

F = Fraction


# ---------- grid oracles on the fixture ----------

def test_ise_brute_exact_on_grid():
    game = build_example_game()
    assert ise_brute(game, 14) == F(123, 14)


def test_ise_brute_lower_bound():
    game = build_example_game()
    best = Solver(game).ise().guarantee
    for d in (2, 5, 7, 14, 28):
        assert ise_brute(game, d) <= best


def test_ise_brute_coarse_grid():
    game = build_example_game()
    assert ise_brute(game, 2) == F(0)


def test_inducible_brute_matches_lp():
    game = build_example_game()
    s = Solver(game)
    for t in range(4):
        brute = inducible_brute(game, t, 28)
        if brute:
            assert s.inducible_target(t)[0]
    assert inducible_brute(game, 3, 28)
    assert not inducible_brute(game, 1, 28)


def test_inducible_brute_single_target():
    game = random_game(GeneratorConfig(seed=4, n=1, num_schedules=1, l=1,
                                       resources=1))
    assert inducible_brute(game, 0, 3)


@pytest.mark.parametrize("seed", range(6))
def test_inducible_brute_one_sided_random(seed):
    cfg = GeneratorConfig(seed=500 + seed, n=4, num_schedules=3, l=2,
                          resources=1)
    game = random_game(cfg)
    s = Solver(game)
    for t in range(game.n):
        if inducible_brute(game, t, 12):
            assert s.inducible_target(t)[0]


def test_grid_guard_trips():
    cfg = GeneratorConfig(seed=9, n=10, num_schedules=8, l=4, resources=3)
    game = random_game(cfg)
    with pytest.raises(GuardError):
        inducible_brute(game, 0, 200)


def test_inducible_brute_checks_target():
    game = build_example_game()
    with pytest.raises(PreconditionError):
        inducible_brute(game, 7, 4)


# ---------- perturbation probe ----------

def test_probe_radius_zero_is_weak_value():
    game = build_example_game()
    x = half_half(game)
    assert guarantee_by_perturbation(game, x, F(0)) == F(0)
    # at (9/14, 5/14) targets 0 and 3 tie, so the weak value is U_d at
    # target 0, not the guarantee 123/14 that a strict perturbation reveals
    y = nine_fourteen(game)
    assert guarantee_by_perturbation(game, y, F(0)) == F(2, 7)


def test_probe_envelope_at_sse_strategy():
    """At the fixture's SSE strategy the guarantee is 0; the probe must stay
    inside the Lipschitz envelope and tighten as the radius shrinks."""
    game = build_example_game()
    x = half_half(game)
    spread = max(p.def_cov - p.def_unc for p in game.payoffs)
    previous = None
    for r in (F(1, 10), F(1, 100), F(1, 1000)):
        v = guarantee_by_perturbation(game, x, r)
        assert abs(v) <= 4 * spread * r
        if previous is not None:
            assert abs(v) <= previous
        previous = abs(v)


def test_probe_near_ise_strategy():
    game = build_example_game()
    y = nine_fourteen(game)
    v = guarantee_by_perturbation(game, y, F(1, 1000))
    assert abs(v - F(123, 14)) <= 12 * F(1, 1000)


def test_probe_rejects_bad_args():
    game = build_example_game()
    x = half_half(game)
    with pytest.raises(PreconditionError):
        guarantee_by_perturbation(game, x, F(-1, 10))
    with pytest.raises(PreconditionError):
        guarantee_by_perturbation(game, x, F(1, 10), samples=0)


def test_probe_stays_on_simplex():
    # shifting more mass than a column holds must clamp, not go negative
    game = build_example_game()
    a = JointSchedule.build(game, (0,))
    b = JointSchedule.build(game, (1,))
    x = MixedStrategy(((a, F(99, 100)), (b, F(1, 100))))
    v = guarantee_by_perturbation(game, x, F(1, 10), samples=3)
    assert isinstance(v, Fraction)
