"""Exception types shared across the library.

The CLI maps these onto exit codes: validation problems exit 3, guard or
size-limit refusals exit 4, and internal invariant violations crash loudly.
"""


class SecgamesError(Exception):
    """Base class for library errors."""


class GameFormatError(SecgamesError):
    """A game, strategy, or config failed validation (bad field, bad index,
    violated model inequality).  Message names the offending field/target."""


class InvalidStrategyError(GameFormatError):
    """A mixed strategy is malformed: negative mass, probabilities not summing
    to one, or a joint schedule infeasible for the game's resources."""


class TooManyJointSchedulesError(SecgamesError):
    """Distinct joint-schedule columns exceed the enumeration cap.  Callers
    should switch to the column-generation path instead of enumerating."""


class GuardError(SecgamesError):
    """A size/digit guard refused to run (e.g. reduction payoffs too large,
    brute-force grid too big).  Deliberate refusal, not a bug."""


class PreconditionError(SecgamesError):
    """An operation's documented precondition does not hold for this input
    (e.g. restricted-game path on a game with identical targets)."""


class InternalInvariantError(SecgamesError):
    """An internal consistency assertion failed (exact LP self-check, empty
    inducible set, iteration cap).  Always a bug or a genuinely degenerate
    input; never caught silently."""
