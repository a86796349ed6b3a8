"""Optimal strategies and cost bounds for the two-state, three-outcome
quantum discrimination game."""

__version__ = "0.1.0"

from .bounds import (  # noqa: F401
    CostMode,
    CostWeights,
    ProjectiveStrategy,
    StatePair,
    StrategyVariant,
    cost_strategy_a,
    cost_strategy_b,
    helstrom,
    ideal_nonprojective_cost,
    k_opt,
    mh_bound,
)
from .cascade import (  # noqa: F401
    IDEAL,
    CascadeParams,
    MeasurementTriple,
    NoiseModel,
    OutcomeProbabilities,
    build_triple,
    cost,
    ideal_probabilities,
    noisy_probabilities,
)
from .montecarlo import TrialConfig, TrialTally, simulate  # noqa: F401
from .optimizer import (  # noqa: F401
    OptimizationResult,
    ThresholdResult,
    ViolationRecord,
    max_violation,
    minimize_cost,
    nelder_mead,
    noise_threshold,
    sweep,
)
