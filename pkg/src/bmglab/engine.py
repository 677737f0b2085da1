"""Simulation engine: play loops, expected payoffs, regret measurement.

Payoff evaluation is exact whenever it can be: a single forward pass when
every outcome distribution is a point mass, otherwise dynamic programming
over realized outcome prefixes while the branch count stays under a cap.
Past the cap it falls back to seeded Monte-Carlo and reports the standard
error alongside the estimate.

Regret is measured against a hypothetical k-adaptive reconstruction of the
opponent: the engine records one real play-through, then replays every
candidate expert against the counterfactual opponent spliced from that
recording.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .adversaries import (
    AdversaryStrategy,
    RecordedPlay,
    hypothetical_k_adaptive,
    oblivious_from_sequence,
)
from .experts import CompositeExpert, FixedStrategy, KAdaptiveStrategy
from .games import (
    BOUNDED_MEMORY,
    Game,
    History,
    outcomes_deterministic,
    sample_index,
    step,
    transition,
)
from .seeding import derive_seed, substream

DEFAULT_BRANCH_CAP = 10**6

Strategy = Union[FixedStrategy, CompositeExpert, KAdaptiveStrategy]

TRANSCRIPT_COLUMNS = (
    "round",
    "state",
    "defender_action",
    "adversary_action",
    "outcome",
    "reward",
)


# =============================================================================
# Defender protocol
# =============================================================================


@dataclass(frozen=True)
class StepFeedback:
    """What the defender learns after one round.

    ``adversary_action`` is None in imperfect-information games.
    """

    t: int
    state: int
    action: int
    outcome: int
    reward: float
    adversary_action: int | None


class Defender:
    """Base class for round-by-round defender players."""

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        """Prepares for a fresh run; called once by play()."""

    def act(self, state: int, t: int) -> int:
        raise NotImplementedError

    def observe(self, feedback: StepFeedback) -> None:
        """Receives the realized round; outcomes only under imperfect information."""


class FixedStrategyDefender(Defender):
    """Plays a fixed state map every round."""

    def __init__(self, strategy: FixedStrategy):
        self.strategy = strategy

    def act(self, state: int, t: int) -> int:
        return self.strategy.action(state)


class CompositeExpertDefender(Defender):
    """Block play: restart the live state's tree every ``depth`` rounds."""

    def __init__(self, expert: CompositeExpert):
        self.expert = expert
        self._prefix: list[int] = []
        self._tree: KAdaptiveStrategy | None = None

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        self._prefix = []
        self._tree = None

    def act(self, state: int, t: int) -> int:
        if t % self.expert.depth == 0:
            self._tree = self.expert.tree(state)
            self._prefix = []
        return self._tree.action(tuple(self._prefix))

    def observe(self, feedback: StepFeedback) -> None:
        if len(self._prefix) + 1 < self.expert.depth:
            self._prefix.append(feedback.outcome)
        else:
            self._prefix = []


class ScriptedDefender(Defender):
    """Plays a fixed action script cyclically; for tests and demos."""

    def __init__(self, script: Sequence[int]):
        if not script:
            raise ValueError("a scripted defender needs at least one action")
        self.script = tuple(script)

    def act(self, state: int, t: int) -> int:
        return self.script[t % len(self.script)]


# =============================================================================
# Transcripts and the play loop
# =============================================================================


@dataclass
class Transcript:
    """Per-round record of one run."""

    game: str
    seed: int
    horizon: int
    states: list[int] = field(default_factory=list)
    defender_actions: list[int] = field(default_factory=list)
    adversary_actions: list[int] = field(default_factory=list)
    outcomes: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)

    def total_reward(self) -> float:
        return float(sum(self.rewards))

    def average_reward(self) -> float:
        return self.total_reward() / self.horizon

    def to_csv(self, path: str, header_lines: Iterable[str] = ()) -> None:
        """Writes the transcript; extra header lines go in as # comments."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(TRANSCRIPT_COLUMNS)
            for t in range(self.horizon):
                writer.writerow(
                    [
                        t,
                        self.states[t],
                        self.defender_actions[t],
                        self.adversary_actions[t],
                        self.outcomes[t],
                        repr(self.rewards[t]),
                    ]
                )


def play(
    game: Game,
    defender: Defender,
    adversary: AdversaryStrategy,
    horizon: int,
    seed: int,
) -> Transcript:
    """Runs ``horizon`` rounds and returns the transcript.

    The outcome draws and the defender's private randomness come from
    separate substreams of ``seed``, so transcripts are reproducible and
    defender randomization never shifts the outcome stream.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    outcome_rng = substream(seed, "outcomes")
    defender.reset(game, horizon, substream(seed, "defender"))
    transcript = Transcript(game=game.name, seed=seed, horizon=horizon)
    outcome_buffer: list[int] = []
    history = History(outcome_buffer)
    state = game.initial_state
    for t in range(horizon):
        d = defender.act(state, t)
        a = adversary.act(history)
        outcome, next_state, reward = step(game, state, d, a, outcome_rng)
        defender.observe(
            StepFeedback(
                t=t,
                state=state,
                action=d,
                outcome=outcome,
                reward=reward,
                adversary_action=a if game.perfect_information else None,
            )
        )
        transcript.states.append(state)
        transcript.defender_actions.append(d)
        transcript.adversary_actions.append(a)
        transcript.outcomes.append(outcome)
        transcript.rewards.append(reward)
        outcome_buffer.append(outcome)
        state = next_state
    return transcript


# =============================================================================
# Expected payoff
# =============================================================================


@dataclass(frozen=True)
class PayoffEstimate:
    """Total expected payoff over a horizon, with evaluation provenance."""

    value: float
    horizon: int
    mode: str  # "exact" or "monte-carlo"
    samples: int | None = None
    stderr: float | None = None

    @property
    def average(self) -> float:
        return self.value / self.horizon


def _strategy_action(
    strategy: Strategy, game: Game, ctx, state: int, t: int
) -> tuple[int, object]:
    """Returns (action, context) applying block resets; ctx threads tree walks."""
    if isinstance(strategy, FixedStrategy):
        return strategy.action(state), None
    if isinstance(strategy, CompositeExpert):
        if t % strategy.depth == 0:
            ctx = (strategy.tree(state), ())
        tree, prefix = ctx
        return tree.action(prefix), ctx
    if isinstance(strategy, KAdaptiveStrategy):
        prefix = () if ctx is None else ctx
        return strategy.action(prefix), prefix
    raise TypeError(f"cannot evaluate strategy of type {type(strategy).__name__}")


def _strategy_next_ctx(strategy: Strategy, ctx, t: int, outcome: int):
    if isinstance(strategy, FixedStrategy):
        return None
    if isinstance(strategy, CompositeExpert):
        tree, prefix = ctx
        if (t + 1) % strategy.depth == 0:
            return ctx  # next act() resets; the stale prefix is never read
        return (tree, prefix + (outcome,))
    return (() if ctx is None else ctx) + (outcome,)


def _branch(game: Game, state: int, d: int, a: int) -> np.ndarray:
    if game.kind == BOUNDED_MEMORY:
        return game.outcome_probs[d, a]
    return game.transition_probs[state, d, a]


def _next_state(game: Game, state: int, outcome: int) -> int:
    if game.kind == BOUNDED_MEMORY:
        return transition(game, state, outcome)
    return outcome


def _simulate_once(
    game: Game,
    strategy: Strategy,
    adversary: AdversaryStrategy,
    start_state: int,
    horizon: int,
    rng: np.random.Generator | None,
) -> float:
    """One realized run; with rng=None outcome draws take the point mass."""
    total = 0.0
    state = start_state
    ctx = None
    buffer: list[int] = []
    history = History(buffer)
    for t in range(horizon):
        d, ctx = _strategy_action(strategy, game, ctx, state, t)
        a = adversary.act(history)
        probs = _branch(game, state, d, a)
        if rng is None:
            outcome = int(np.argmax(probs))
        else:
            outcome = sample_index(probs, rng)
        total += float(game.payoff[state, d, a])
        ctx = _strategy_next_ctx(strategy, ctx, t, outcome)
        buffer.append(outcome)
        state = _next_state(game, state, outcome)
    return total


def expected_payoff(
    game: Game,
    strategy: Strategy,
    adversary: AdversaryStrategy,
    start_state: int,
    horizon: int,
    *,
    samples: int = 1000,
    seed: int = 0,
    branch_cap: int = DEFAULT_BRANCH_CAP,
) -> PayoffEstimate:
    """Expected total payoff of a strategy over ``horizon`` rounds.

    Args:
        game: The game; evaluation starts at ``start_state``.
        strategy: Fixed strategy (played per round), composite expert (block
            play), or a single tree (needs horizon <= depth).
        adversary: Opponent, fed the outcome history from an empty start.
        start_state: State at round 0.
        horizon: Number of rounds.
        samples: Monte-Carlo sample count when exact evaluation is infeasible.
        seed: Master seed for the Monte-Carlo substreams.
        branch_cap: Largest outcome-prefix tree the exact mode may expand.

    Returns:
        A PayoffEstimate; ``mode`` records whether it is exact or sampled.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if not 0 <= start_state < game.n_states:
        raise ValueError(f"start state {start_state} out of range")
    if isinstance(strategy, KAdaptiveStrategy) and horizon > strategy.depth:
        raise ValueError(
            f"a depth-{strategy.depth} tree cannot span horizon {horizon}"
        )

    if outcomes_deterministic(game):
        value = _simulate_once(game, strategy, adversary, start_state, horizon, None)
        return PayoffEstimate(value=value, horizon=horizon, mode="exact")

    n_branches = game.n_outcomes if game.kind == BOUNDED_MEMORY else game.n_states
    if n_branches**horizon <= branch_cap:

        def rec(t: int, state: int, ctx, hist: tuple[int, ...]) -> float:
            if t == horizon:
                return 0.0
            d, new_ctx = _strategy_action(strategy, game, ctx, state, t)
            a = adversary.act(History(hist))
            probs = _branch(game, state, d, a)
            value = float(game.payoff[state, d, a])
            for outcome, p in enumerate(probs):
                if p <= 0.0:
                    continue
                value += p * rec(
                    t + 1,
                    _next_state(game, state, outcome),
                    _strategy_next_ctx(strategy, new_ctx, t, outcome),
                    hist + (outcome,),
                )
            return value

        return PayoffEstimate(
            value=rec(0, start_state, None, ()), horizon=horizon, mode="exact"
        )

    totals = np.empty(samples)
    for i in range(samples):
        totals[i] = _simulate_once(
            game, strategy, adversary, start_state, horizon, substream(seed, "mc", i)
        )
    stderr = float(totals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return PayoffEstimate(
        value=float(totals.mean()),
        horizon=horizon,
        mode="monte-carlo",
        samples=samples,
        stderr=stderr,
    )


# =============================================================================
# Repeated-game lift
# =============================================================================

BlockAdversary = Union[AdversaryStrategy, Sequence[int], Callable[[tuple[int, ...], int], int]]


def as_block_adversary(block: BlockAdversary) -> AdversaryStrategy:
    """Normalizes a block opponent: action script, window rule, or strategy."""
    if isinstance(block, AdversaryStrategy):
        return block
    if callable(block):
        fn = block

        def act(history: History) -> int:
            return fn(history.as_tuple(), len(history))

        return AdversaryStrategy(act=act, adaptiveness=math.inf, name="block-fn")
    return oblivious_from_sequence(block)


@dataclass(frozen=True)
class RepeatedGame:
    """View of a game as one-shot blocks of K rounds, always from the start state.

    Each block is scored from the game's initial state regardless of where a
    live run would actually be, which is what makes block scores comparable
    across a run; a live block's payoff differs from this by at most
    ``memory`` because the window state forgets everything older than m
    outcomes.
    """

    game: Game
    block_length: int

    def payoff(self, strategy: Strategy, block: BlockAdversary) -> float:
        """Exact expected block payoff Pay(strategy, block) from the start state."""
        return expected_payoff(
            self.game,
            strategy,
            as_block_adversary(block),
            self.game.initial_state,
            self.block_length,
        ).value


def lift_to_repeated(game: Game, block_length: int) -> RepeatedGame:
    """Wraps a game as a repeated game over K-round blocks.

    Raises:
        ValueError: For general-stochastic games (no window state to reset)
            or a non-positive block length.
    """
    if game.kind != BOUNDED_MEMORY:
        raise ValueError("only bounded-memory games lift to repeated block games")
    if block_length < 1:
        raise ValueError(f"block length must be >= 1, got {block_length}")
    return RepeatedGame(game=game, block_length=block_length)


def block_payoff(
    game: Game,
    strategy: Strategy,
    block: BlockAdversary,
    start_state: int,
    block_length: int,
) -> float:
    """Exact expected payoff of one K-round block from an arbitrary state."""
    return expected_payoff(
        game, strategy, as_block_adversary(block), start_state, block_length
    ).value


# =============================================================================
# Regret
# =============================================================================


@dataclass(frozen=True)
class RegretReport:
    """k-adaptive regret of one run against an expert set.

    The algorithm side is the realized average reward of the recorded run
    (which coincides with its reward against the hypothetical opponent, since
    that opponent reproduces the recorded actions on the recorded history).
    Expert payoffs are expected values against the hypothetical opponent;
    ``eval_mode`` says whether they were computed exactly.
    """

    game: str
    horizon: int
    k: float
    seed: int
    expert_set: str
    n_experts: int
    best_expert: int
    best_average: float
    algorithm_average: float
    regret: float
    eval_mode: str
    eval_stderr: float | None


def evaluate_experts(
    game: Game,
    experts: Sequence[Strategy],
    adversary: AdversaryStrategy,
    horizon: int,
    *,
    samples: int = 400,
    seed: int = 0,
) -> list[PayoffEstimate]:
    """Expected payoff of each expert against one adversary, from the start state."""
    return [
        expected_payoff(
            game,
            expert,
            adversary,
            game.initial_state,
            horizon,
            samples=samples,
            seed=derive_seed(seed, "expert-eval", i),
        )
        for i, expert in enumerate(experts)
    ]


def best_expert_oracle(
    game: Game,
    experts: Sequence[Strategy],
    adversary: AdversaryStrategy,
    horizon: int,
    *,
    samples: int = 400,
    seed: int = 0,
) -> tuple[int, PayoffEstimate]:
    """Exhaustive best expert; ties go to the lowest index."""
    if not experts:
        raise ValueError("need at least one expert")
    estimates = evaluate_experts(
        game, experts, adversary, horizon, samples=samples, seed=seed
    )
    best = max(range(len(estimates)), key=lambda i: (estimates[i].value, -i))
    return best, estimates[best]


def k_adaptive_regret(
    game: Game,
    defender: Defender,
    adversary: AdversaryStrategy,
    horizon: int,
    k: float,
    experts: Sequence[Strategy],
    *,
    seed: int = 0,
    expert_set: str = "experts",
    samples: int = 400,
) -> RegretReport:
    """Runs the defender once and measures its k-adaptive regret.

    The recorded play-through defines the hypothetical k-adaptive opponent;
    every expert is then scored against that opponent over the same horizon,
    and the regret is the best expert's average minus the run's realized
    average.
    """
    if not experts:
        raise ValueError("need at least one expert")
    transcript = play(game, defender, adversary, horizon, seed)
    recorded = RecordedPlay(History(tuple(transcript.outcomes)), adversary)
    hypothetical = hypothetical_k_adaptive(recorded, k)
    estimates = evaluate_experts(
        game, experts, hypothetical, horizon, samples=samples, seed=seed
    )
    best = max(range(len(estimates)), key=lambda i: (estimates[i].value, -i))
    best_avg = estimates[best].average
    realized = transcript.average_reward()
    mode = "exact" if all(e.mode == "exact" for e in estimates) else "monte-carlo"
    return RegretReport(
        game=game.name,
        horizon=horizon,
        k=k,
        seed=seed,
        expert_set=expert_set,
        n_experts=len(experts),
        best_expert=best,
        best_average=best_avg,
        algorithm_average=realized,
        regret=best_avg - realized,
        eval_mode=mode,
        eval_stderr=estimates[best].stderr,
    )
