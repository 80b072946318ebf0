"""Exact solvers for Stackelberg security games with schedule constraints.

Computes strong Stackelberg equilibria, defender utility guarantees under
attacker tie-breaking uncertainty, inducible targets/elements, and the
equilibrium that maximizes the guarantee, all in exact rational arithmetic.
"""

from .equilibria import (
    EquilibriumResult,
    GuaranteeReport,
    Solver,
    feasible_target,
    feasible_target_via_sse,
    inducibility_via_reduction,
    inducible_elements,
    inducible_target,
    ise,
    ise_via_restricted_game,
    m1_bound,
    m2_bound,
    sse,
    sse_overoptimistic,
    sse_suboptimal,
    utility_guarantee,
)
from .errors import (
    GameFormatError,
    GuardError,
    InternalInvariantError,
    InvalidStrategyError,
    PreconditionError,
    SecgamesError,
    TooManyJointSchedulesError,
)
from .game import (
    Element,
    ElementPartition,
    JointSchedule,
    MixedStrategy,
    PayoffTable,
    SecurityGame,
    TargetPayoffs,
    attack_set,
    attacker_utility,
    coverage_of,
    defender_utility,
    element_partition,
    strong_tie_break,
    weak_tie_break,
)
from .instances import (
    GeneratorConfig,
    SplitMix64,
    example2_game,
    load_game,
    random_game,
    random_ssas_game,
    random_strategy,
    save_game,
)
from .rationals import Rational, format_decimal, format_rational, parse_rational

__version__ = "0.1.0"

__all__ = [
    "Element",
    "ElementPartition",
    "EquilibriumResult",
    "GameFormatError",
    "GeneratorConfig",
    "GuaranteeReport",
    "GuardError",
    "InternalInvariantError",
    "InvalidStrategyError",
    "JointSchedule",
    "MixedStrategy",
    "PayoffTable",
    "PreconditionError",
    "Rational",
    "SecgamesError",
    "SecurityGame",
    "Solver",
    "SplitMix64",
    "TargetPayoffs",
    "TooManyJointSchedulesError",
    "attack_set",
    "attacker_utility",
    "coverage_of",
    "defender_utility",
    "element_partition",
    "example2_game",
    "feasible_target",
    "feasible_target_via_sse",
    "format_decimal",
    "format_rational",
    "inducibility_via_reduction",
    "inducible_elements",
    "inducible_target",
    "ise",
    "ise_via_restricted_game",
    "load_game",
    "m1_bound",
    "m2_bound",
    "parse_rational",
    "random_game",
    "random_ssas_game",
    "random_strategy",
    "save_game",
    "sse",
    "sse_overoptimistic",
    "sse_suboptimal",
    "strong_tie_break",
    "utility_guarantee",
    "weak_tie_break",
    "__version__",
]
