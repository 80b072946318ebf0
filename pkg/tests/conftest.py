"""Shared fixtures.  The four-target regression game is built from raw
domain constructors here so fixture tests stay independent of the loader
and generator modules."""

from fractions import Fraction

import pytest

from secgames.game import (JointSchedule, MixedStrategy, PayoffTable,
                           SecurityGame, TargetPayoffs)

F = Fraction


def build_example_game() -> SecurityGame:
    """Four targets, two schedules ({0,1,2} and {3}), one resource that may
    take either.  Used as an exact regression fixture throughout the suite."""
    payoffs = PayoffTable((
        TargetPayoffs(F(1), F(-1), F(-1), F(1)),
        TargetPayoffs(F(100), F(0), F(-2), F(2)),
        TargetPayoffs(F(2), F(-2), F(-3), F(3)),
        TargetPayoffs(F(30), F(-3), F(-8), F(4)),
    ))
    return SecurityGame(
        n=4,
        payoffs=payoffs,
        schedules=(frozenset({0, 1, 2}), frozenset({3})),
        resources=(frozenset({0, 1}),),
    )


@pytest.fixture
def example_game() -> SecurityGame:
    return build_example_game()


def half_half(game: SecurityGame) -> MixedStrategy:
    """Uniform mix of the two single-schedule joint schedules."""
    a = JointSchedule.build(game, (0,))
    b = JointSchedule.build(game, (1,))
    return MixedStrategy(((a, F(1, 2)), (b, F(1, 2))))


def nine_fourteen(game: SecurityGame) -> MixedStrategy:
    a = JointSchedule.build(game, (0,))
    b = JointSchedule.build(game, (1,))
    return MixedStrategy(((a, F(9, 14)), (b, F(5, 14))))
