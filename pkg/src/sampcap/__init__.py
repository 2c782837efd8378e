"""Capacity bounds for finite-state channels with sampled, cost-constrained feedback.

The package computes exact directed information over short blocks, runs an
alternating-maximization algorithm with a Lagrangian cost sweep to bracket
the capacity-cost tradeoff, evaluates single-letter analytic lower bounds,
and cross-checks everything against brute-force oracles at desk scale.
"""

from ._num import binary_entropy
from .actions import (
    ActionSystem,
    StrategyExpansion,
    expand_decoder_strategies,
    expected_cost,
    sample_feedback,
)
from .baa import (
    BaaState,
    SandwichBounds,
    TradeoffCurve,
    TradeoffPoint,
    bisect_lambda_for_cost,
    default_lambda_grid,
    lower_bound,
    run_baa,
    sandwich_bounds,
    sweep_lambda,
    update_q,
    update_r,
    upper_bound,
)
from .bounds import (
    ExponentQuery,
    SingleLetterProblem,
    backward_link_capacity_nocost,
    f_n_policy_grid,
    gallager_exponent,
    single_letter_curve,
    single_letter_lower,
    time_sharing_baseline,
    zero_unit_cost_capacity,
)
from .fsc import (
    Alphabet,
    FscKernel,
    StationaryInfo,
    causal_channel_prob,
    is_indecomposable,
    is_no_isi,
    stationary_distribution,
    validate_kernel,
)
from .oracle import (
    OracleReport,
    grid_capacity,
    grid_search_space,
    literal_directed_info,
    literal_r_update,
)
from .policy import (
    CausalPolicy,
    HistoryIndexer,
    TrajectoryDistribution,
    build_joint,
    conditional_directed_information,
    directed_information,
    mutual_information,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSystem",
    "Alphabet",
    "BaaState",
    "CausalPolicy",
    "ExponentQuery",
    "FscKernel",
    "HistoryIndexer",
    "OracleReport",
    "SandwichBounds",
    "SingleLetterProblem",
    "StationaryInfo",
    "StrategyExpansion",
    "TradeoffCurve",
    "TradeoffPoint",
    "TrajectoryDistribution",
    "backward_link_capacity_nocost",
    "binary_entropy",
    "bisect_lambda_for_cost",
    "build_joint",
    "causal_channel_prob",
    "conditional_directed_information",
    "default_lambda_grid",
    "directed_information",
    "expand_decoder_strategies",
    "expected_cost",
    "f_n_policy_grid",
    "gallager_exponent",
    "grid_capacity",
    "grid_search_space",
    "is_indecomposable",
    "is_no_isi",
    "literal_directed_info",
    "literal_r_update",
    "lower_bound",
    "mutual_information",
    "run_baa",
    "sample_feedback",
    "sandwich_bounds",
    "single_letter_curve",
    "single_letter_lower",
    "stationary_distribution",
    "sweep_lambda",
    "time_sharing_baseline",
    "update_q",
    "update_r",
    "upper_bound",
    "validate_kernel",
    "zero_unit_cost_capacity",
    "__version__",
]
