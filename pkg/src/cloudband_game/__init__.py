"""Solver library for botnet-DDoS attack and defense on a multi-band cloud.

Computes per-band functionality probabilities, attacker/defender utilities
with cross-band attack propagation, and equilibria (best response, pure and
mixed Nash, defender-first sequential).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND_ENV_VAR, active_backend
from .game import (
    EquilibriumResult,
    PayoffTable,
    best_response,
    build_payoff_table,
    expected_utilities,
    mixed_nash,
    pure_nash,
    stackelberg_solve,
)
from .model import (
    ATTACKER,
    DEFENDER,
    AllocationStrategy,
    CloudBandSpec,
    GameSpec,
    InvalidSpecError,
    MixedStrategy,
    StrategySpaceTooLarge,
    enumerate_strategies,
    game_spec_from_dict,
    game_spec_to_dict,
    load_game_spec,
    validate_spec,
)
from .payoff import (
    ProfileEvaluation,
    attacker_utility,
    cascade_loss,
    defender_utility,
    evaluate_profile,
)
from .prob import (
    FunctionalityQuery,
    MonteCarloEstimate,
    binom_cdf,
    binom_pmf,
    functionality_probability,
    min_defenses_for_target,
    monte_carlo_functionality,
)
from .runner import (
    SCENARIO_NAMES,
    SweepRequest,
    SweepResult,
    baseline_game_spec,
    emit_sweep,
    read_sweep_file,
    run_probability_curves,
    run_sweep,
    run_threshold_table,
    run_utility_surface,
    scenario_request,
    scenario_thresholds,
)

__all__ = [
    "__version__",
    "ATTACKER",
    "DEFENDER",
    "BACKEND_ENV_VAR",
    "AllocationStrategy",
    "CloudBandSpec",
    "EquilibriumResult",
    "FunctionalityQuery",
    "GameSpec",
    "InvalidSpecError",
    "MixedStrategy",
    "MonteCarloEstimate",
    "PayoffTable",
    "ProfileEvaluation",
    "StrategySpaceTooLarge",
    "SweepRequest",
    "SweepResult",
    "SCENARIO_NAMES",
    "active_backend",
    "attacker_utility",
    "baseline_game_spec",
    "best_response",
    "binom_cdf",
    "binom_pmf",
    "build_payoff_table",
    "cascade_loss",
    "defender_utility",
    "emit_sweep",
    "enumerate_strategies",
    "evaluate_profile",
    "expected_utilities",
    "functionality_probability",
    "game_spec_from_dict",
    "game_spec_to_dict",
    "load_game_spec",
    "min_defenses_for_target",
    "mixed_nash",
    "monte_carlo_functionality",
    "pure_nash",
    "read_sweep_file",
    "run_probability_curves",
    "run_sweep",
    "run_threshold_table",
    "run_utility_surface",
    "scenario_request",
    "scenario_thresholds",
    "stackelberg_solve",
    "validate_spec",
]
