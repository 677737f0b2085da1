"""Bounded-memory stochastic games, adaptive adversaries, and regret tooling."""

from .adversaries import (
    FULLY_ADAPTIVE,
    AdversaryStrategy,
    RecordedPlay,
    alternating_tourists,
    de_bruijn,
    hypothetical_k_adaptive,
    is_de_bruijn,
    k_adaptive,
    oblivious_from_sequence,
    tourist_a1,
    tourist_a2,
)
from .engine import (
    CompositeExpertDefender,
    Defender,
    FixedStrategyDefender,
    PayoffEstimate,
    RegretReport,
    RepeatedGame,
    ScriptedDefender,
    StepFeedback,
    Transcript,
    best_expert_oracle,
    block_payoff,
    evaluate_experts,
    expected_payoff,
    k_adaptive_regret,
    lift_to_repeated,
    play,
)
from .experts import (
    CompositeExpert,
    FixedStrategy,
    KAdaptiveStrategy,
    Trace,
    consistent_traces,
    count_composite,
    count_fixed_strategies,
    count_k_adaptive,
    enumerate_composite_experts,
    enumerate_fixed_strategies,
    enumerate_k_adaptive,
    fixed_as_composite,
    n_tree_nodes,
    speeding_always_li,
    speeding_hi_every_kth,
)
from .games import (
    BOUNDED_MEMORY,
    GENERAL_STOCHASTIC,
    CommitmentSolution,
    Game,
    GameConfigError,
    History,
    build_counterexample_game,
    build_speeding_game,
    build_tiny_game,
    commitment_value,
    decode_window,
    encode_window,
    evolve,
    game_config,
    load_game,
    load_game_file,
    speeding_commitment,
    transition,
)
from .hardness import (
    Cnf3,
    HardnessGame,
    RecoveryResult,
    assignment_recovery,
    build_hardness_game,
    count_satisfied,
    fixed_from_assignment,
    max3sat_adversary,
    max_phase_payoff,
    parse_dimacs,
    phase_payoff,
    random_cnf3,
    satisfied_fraction,
)
from .learners import (
    BlockExp3Defender,
    Exp3,
    Exp3Defender,
    PhasedTraceHedgeDefender,
    TraceHedgeDefender,
    TraceTable,
    block_length,
    block_loss,
    exp3_exploration,
    samp,
    tree_log_weight,
    tree_probability,
)
from .seeding import derive_seed, substream

__version__ = "0.1.0"
