"""Regret-minimizing defenders.

Three learners, one per information/scale regime:

* ``BlockExp3Defender``: bandit (Exp3) over an explicit finite expert list,
  played on K-round blocks so that window states roughly renew between
  pulls.  K grows like T^(1/4).
* ``TraceHedgeDefender``: perfect information.  Weighted majority over the
  full doubly-exponential family of per-state strategy trees, maintained
  implicitly through per-trace cumulative gains; a sampled tree is drawn
  fresh at every block from the live state's subtree weights.
* ``PhasedTraceHedgeDefender``: imperfect information.  Same trace table,
  but gains are estimated by dedicating one uniformly hidden block per
  phase to each of the |D|^K action scripts and inflating the observed
  rewards by the phase length.

All weights are kept in log domain as (eta, cumulative gain) pairs;
distributions are formed with max-shifted exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import Defender, StepFeedback, as_block_adversary, expected_payoff
from .experts import (
    CompositeExpert,
    DEFAULT_TRACE_CAP,
    FixedStrategy,
    KAdaptiveStrategy,
    Trace,
    enumeration_cap,
    n_tree_nodes,
)
from .games import BOUNDED_MEMORY, Game, sample_index, transition
from .seeding import derive_seed


# =============================================================================
# Exp3
# =============================================================================


class Exp3:
    """Exponential-weights bandit with uniform exploration mixing.

    Gains must lie in [0, 1].  The chosen arm's gain is importance-weighted
    by its play probability; only that arm's weight moves.
    """

    def __init__(self, n_arms: int, gamma: float):
        if n_arms < 1:
            raise ValueError(f"need at least one arm, got {n_arms}")
        if not 0 < gamma <= 1:
            raise ValueError(f"exploration rate must be in (0, 1], got {gamma}")
        self.n_arms = n_arms
        self.gamma = gamma
        self.log_weights = np.zeros(n_arms)

    def probabilities(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return (1.0 - self.gamma) * w / w.sum() + self.gamma / self.n_arms

    def sample(self, rng: np.random.Generator) -> int:
        return sample_index(self.probabilities(), rng)

    def step(self, chosen: int, gain: float) -> np.ndarray:
        """Applies one bandit update and returns the next play distribution."""
        if not 0 <= chosen < self.n_arms:
            raise ValueError(f"arm {chosen} out of range")
        if not -1e-12 <= gain <= 1 + 1e-12:
            raise ValueError(f"gains must lie in [0, 1], got {gain}")
        gain = min(1.0, max(0.0, gain))
        p = self.probabilities()[chosen]
        self.log_weights[chosen] += self.gamma * (gain / p) / self.n_arms
        return self.probabilities()


def exp3_exploration(n_arms: int, horizon: int) -> float:
    """Exploration rate min(1, sqrt(N ln N / ((e - 1) T)))."""
    if n_arms <= 1:
        return 1.0
    return min(
        1.0, math.sqrt(n_arms * math.log(n_arms) / ((math.e - 1.0) * max(1, horizon)))
    )


class Exp3Defender(Defender):
    """Per-round Exp3 over the defender's own actions; ignores state."""

    def __init__(self, gamma: float | None = None):
        self._gamma = gamma
        self.exp3: Exp3 | None = None
        self._rng: np.random.Generator | None = None
        self._arm = 0

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        gamma = self._gamma
        if gamma is None:
            gamma = exp3_exploration(game.n_defender_actions, horizon)
        self.exp3 = Exp3(game.n_defender_actions, gamma)
        self._rng = rng

    def act(self, state: int, t: int) -> int:
        self._arm = self.exp3.sample(self._rng)
        return self._arm

    def observe(self, feedback: StepFeedback) -> None:
        self.exp3.step(self._arm, feedback.reward)


# =============================================================================
# Exp3 over an expert list on K-round blocks
# =============================================================================


def block_length(horizon: int, k: int) -> int:
    """Block length: near T^(1/4), rounded to a positive multiple of k."""
    if k < 0:
        raise ValueError(f"adaptiveness must be >= 0, got {k}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    quarter = horizon**0.25
    if k == 0:
        return max(1, round(quarter))
    return max(k, k * round(quarter / k))


class BlockExp3Defender(Defender):
    """Theorem-style reduction: Exp3 over experts, one pull per K-round block.

    After each block the chosen expert is credited with its *hypothetical*
    block gain: the expected payoff it would collect against the observed
    adversary action script, replayed from the game's start state.  That
    score is what makes blocks comparable (the live window differs from the
    start state's by at most m rounds of drift).  Without adversary-action
    feedback (imperfect information) the realized block reward is used
    instead, which sits within m of the hypothetical score.
    """

    def __init__(
        self,
        game: Game,
        experts: Sequence[FixedStrategy | CompositeExpert],
        k: int,
        horizon: int,
        *,
        gamma: float | None = None,
        eval_samples: int = 64,
    ):
        if game.kind != BOUNDED_MEMORY:
            raise ValueError("block learning needs a bounded-memory game")
        if not experts:
            raise ValueError("need at least one expert")
        self.game = game
        self.block_len = block_length(horizon, k)
        if horizon < self.block_len:
            raise ValueError(
                f"horizon {horizon} is shorter than one block ({self.block_len})"
            )
        for e in experts:
            if isinstance(e, CompositeExpert) and e.depth != self.block_len:
                raise ValueError(
                    f"composite expert depth {e.depth} != block length {self.block_len}"
                )
        self.experts = list(experts)
        self.horizon = horizon
        self._gamma = gamma if gamma is not None else exp3_exploration(
            len(experts), horizon // self.block_len
        )
        self._eval_samples = eval_samples
        self.exp3: Exp3 | None = None
        self.chosen: list[int] = []

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        self.exp3 = Exp3(len(self.experts), self._gamma)
        self._rng = rng
        self.chosen = []
        self._arm = 0
        self._root = 0
        self._prefix: list[int] = []
        self._advs: list[int] = []
        self._realized = 0.0
        self._block_index = 0

    def act(self, state: int, t: int) -> int:
        if t % self.block_len == 0:
            self._arm = self.exp3.sample(self._rng)
            self.chosen.append(self._arm)
            self._root = state
            self._prefix = []
            self._advs = []
            self._realized = 0.0
        expert = self.experts[self._arm]
        if isinstance(expert, FixedStrategy):
            return expert.action(state)
        return expert.tree(self._root).action(self._prefix)

    def observe(self, feedback: StepFeedback) -> None:
        self._prefix.append(feedback.outcome)
        self._realized += feedback.reward
        if feedback.adversary_action is not None:
            self._advs.append(feedback.adversary_action)
        if len(self._prefix) < self.block_len:
            return
        gain = self._block_gain()
        self.exp3.step(self._arm, gain)
        self._block_index += 1
        self._prefix = []

    def _block_gain(self) -> float:
        if len(self._advs) == self.block_len:
            estimate = expected_payoff(
                self.game,
                self.experts[self._arm],
                as_block_adversary(self._advs),
                self.game.initial_state,
                self.block_len,
                samples=self._eval_samples,
                seed=int(self._rng.integers(2**63)),
            )
            total = estimate.value
        else:
            total = self._realized
        return min(1.0, max(0.0, total / self.block_len))


# =============================================================================
# Trace tables
# =============================================================================


def block_loss(
    game: Game,
    trace: Trace,
    adversary_actions: Sequence[int],
    live_root: int,
) -> float:
    """Score of one trace for one observed adversary block.

    Zero unless the trace is rooted at the block's live state.  Otherwise the
    payoff of the trace's final action, taken in the state reached from the
    game's start state by the trace outcomes, discounted by the probability
    of those outcomes under the trace/script actions.
    """
    if game.kind != BOUNDED_MEMORY:
        raise ValueError("traces are only defined for bounded-memory games")
    depth = trace.depth
    if len(adversary_actions) < depth:
        raise ValueError(
            f"need {depth} adversary actions for a depth-{depth} trace, "
            f"got {len(adversary_actions)}"
        )
    if trace.root != live_root:
        return 0.0
    q = 1.0
    s_hyp = game.initial_state
    for j in range(depth - 1):
        q *= float(
            game.outcome_probs[trace.actions[j], adversary_actions[j], trace.outcomes[j]]
        )
        s_hyp = transition(game, s_hyp, trace.outcomes[j])
    return q * float(
        game.payoff[s_hyp, trace.actions[depth - 1], adversary_actions[depth - 1]]
    )


class TraceTable:
    """Cumulative per-trace gains for every (root, action/outcome stub).

    Trace indexing within a depth: a depth-1 trace is its action; extending a
    trace by (outcome O, action d) maps index p to p*(|O||D|) + O*|D| + d.
    This makes parent/child moves pure arithmetic and lets block updates run
    as vectorized gathers per depth.

    The weight of trace p is exp(eta * L_p); an expert's implicit weight is
    the product over its consistent traces, maintained here without ever
    enumerating experts.
    """

    def __init__(
        self, game: Game, block_len: int, eta: float, cap: int | None = None
    ):
        if game.kind != BOUNDED_MEMORY:
            raise ValueError("trace tables need a bounded-memory game")
        if block_len < 1:
            raise ValueError(f"block length must be >= 1, got {block_len}")
        self.game = game
        self.block_len = block_len
        self.eta = eta
        B, D = game.n_outcomes, game.n_defender_actions
        self._sizes = [0] + [D * (B * D) ** (i - 1) for i in range(1, block_len + 1)]
        total = game.n_states * sum(self._sizes)
        limit = enumeration_cap(DEFAULT_TRACE_CAP) if cap is None else cap
        if total > limit:
            raise ValueError(
                f"{total} traces exceed the cap of {limit}; shrink the block "
                f"or raise BMG_LAB_CAP"
            )
        self.n_traces = total

        # Static per-depth structure, shared by all roots.
        self._parent = [None, None] + [
            np.arange(self._sizes[i]) // (B * D) for i in range(2, block_len + 1)
        ]
        self._new_out = [None, None] + [
            (np.arange(self._sizes[i]) % (B * D)) // D for i in range(2, block_len + 1)
        ]
        self._final = [None] + [
            np.arange(self._sizes[i]) % D for i in range(1, block_len + 1)
        ]
        # State reached from the start state by each outcome prefix.
        hyp = [None, np.array([game.initial_state])]
        for i in range(2, block_len + 1):
            prev = hyp[i - 1]
            codes = np.arange(B ** (i - 1))
            hyp.append(
                np.array(
                    [transition(game, int(prev[c // B]), int(c % B)) for c in codes]
                )
            )
        oprefix = [None, np.zeros(self._sizes[1], dtype=np.int64)]
        for i in range(2, block_len + 1):
            oprefix.append(oprefix[i - 1][self._parent[i]] * B + self._new_out[i])
        self._hyp_state = [None] + [
            hyp[i][oprefix[i]] for i in range(1, block_len + 1)
        ]

        self.losses: list[list[np.ndarray]] = []
        self.updates = 0
        self.reset()

    def reset(self) -> None:
        """Zeroes all cumulative gains."""
        self.losses = [
            [None] + [np.zeros(self._sizes[i]) for i in range(1, self.block_len + 1)]
            for _ in range(self.game.n_states)
        ]
        self.updates = 0

    def update(self, live_root: int, adversary_actions: Sequence[int]) -> None:
        """Adds one observed block's scores to every trace (non-roots get 0)."""
        a = [int(x) for x in adversary_actions]
        if len(a) != self.block_len:
            raise ValueError(
                f"need {self.block_len} adversary actions, got {len(a)}"
            )
        game = self.game
        L = self.losses[live_root]
        D = game.n_defender_actions
        L[1] += game.payoff[game.initial_state, :, a[0]]
        q = np.ones(D)
        for i in range(2, self.block_len + 1):
            par = self._parent[i]
            q = q[par] * game.outcome_probs[
                self._final[i - 1][par], a[i - 2], self._new_out[i]
            ]
            L[i] += q * game.payoff[self._hyp_state[i], self._final[i], a[i - 1]]
        self.updates += 1

    def add_gain(self, root: int, depth: int, index: int, gain: float) -> None:
        """Adds an externally estimated gain to a single trace."""
        self.losses[root][depth][index] += gain

    def trace_index(self, trace: Trace) -> tuple[int, int]:
        """(depth, within-depth index) of a trace under the table's coding."""
        B, D = self.game.n_outcomes, self.game.n_defender_actions
        idx = trace.actions[0]
        for j in range(1, trace.depth):
            idx = idx * (B * D) + trace.outcomes[j - 1] * D + trace.actions[j]
        return trace.depth, int(idx)

    def loss_of(self, trace: Trace) -> float:
        depth, idx = self.trace_index(trace)
        return float(self.losses[trace.root][depth][idx])

    def log_subtree_weights(self, root: int) -> list[np.ndarray]:
        """Per-depth log subtree weights h for one root, leaves upward.

        h of a maximal trace is its own weight; otherwise the trace's weight
        times the product over outcomes of the summed h of its extensions.
        """
        B, D = self.game.n_outcomes, self.game.n_defender_actions
        L = self.losses[root]
        logh: list[np.ndarray | None] = [None] * (self.block_len + 1)
        logh[self.block_len] = self.eta * L[self.block_len]
        for i in range(self.block_len - 1, 0, -1):
            child = logh[i + 1].reshape(self._sizes[i], B, D)
            peak = child.max(axis=2, keepdims=True)
            lse = peak[:, :, 0] + np.log(
                np.exp(child - peak).sum(axis=2)
            )
            logh[i] = self.eta * L[i] + lse.sum(axis=1)
        return logh


def samp(
    table: TraceTable, root: int, rng: np.random.Generator
) -> KAdaptiveStrategy:
    """Draws one strategy tree for ``root`` from the implicit weight law.

    Materializes only the queried root's subtree: actions are sampled top
    down, each node proportional to the subtree weights of its candidate
    extensions, which realizes the tree with probability proportional to the
    product of its consistent traces' weights.
    """
    game = table.game
    B, D = game.n_outcomes, game.n_defender_actions
    K = table.block_len
    logh = table.log_subtree_weights(root)
    actions = [0] * n_tree_nodes(B, K)
    # (prefix length, prefix code, first candidate trace index at depth L+1)
    stack: list[tuple[int, int, int]] = [(0, 0, 0)]
    offset = [n_tree_nodes(B, length) for length in range(K + 1)]
    while stack:
        length, code, base = stack.pop()
        logs = logh[length + 1][base : base + D]
        probs = np.exp(logs - logs.max())
        probs /= probs.sum()
        d = sample_index(probs, rng)
        actions[offset[length] + code] = d
        if length + 1 < K:
            chosen = base + d
            for o in range(B):
                stack.append((length + 1, code * B + o, chosen * (B * D) + o * D))
    return KAdaptiveStrategy(depth=K, n_outcomes=B, actions=tuple(actions))


def samp_node_distributions(
    table: TraceTable, root: int
) -> dict[tuple[int, int], np.ndarray]:
    """Per-node conditional action laws the sampler would use, keyed by
    (candidate base index, node index).  Diagnostic helper for tiny games."""
    game = table.game
    B, D = game.n_outcomes, game.n_defender_actions
    K = table.block_len
    logh = table.log_subtree_weights(root)
    out: dict[tuple[int, int], np.ndarray] = {}
    offset = [n_tree_nodes(B, length) for length in range(K + 1)]
    stack: list[tuple[int, int, int]] = [(0, 0, 0)]
    while stack:
        length, code, base = stack.pop()
        logs = logh[length + 1][base : base + D]
        probs = np.exp(logs - logs.max())
        probs /= probs.sum()
        out[(base, offset[length] + code)] = probs
        if length + 1 < K:
            for d in range(D):
                for o in range(B):
                    stack.append(
                        (length + 1, code * B + o, (base + d) * (B * D) + o * D)
                    )
    return out


def tree_probability(table: TraceTable, root: int, tree: KAdaptiveStrategy) -> float:
    """Probability that samp() returns exactly ``tree`` for ``root``."""
    game = table.game
    B, D = game.n_outcomes, game.n_defender_actions
    K = table.block_len
    if tree.depth != K or tree.n_outcomes != B:
        raise ValueError("tree shape does not match the table")
    logh = table.log_subtree_weights(root)
    offset = [n_tree_nodes(B, length) for length in range(K + 1)]
    logp = 0.0
    stack: list[tuple[int, int, int]] = [(0, 0, 0)]
    while stack:
        length, code, base = stack.pop()
        logs = logh[length + 1][base : base + D]
        peak = logs.max()
        norm = peak + math.log(np.exp(logs - peak).sum())
        d = tree.actions[offset[length] + code]
        logp += float(logs[d] - norm)
        if length + 1 < K:
            chosen = base + d
            for o in range(B):
                stack.append((length + 1, code * B + o, chosen * (B * D) + o * D))
    return math.exp(logp)


def tree_log_weight(table: TraceTable, root: int, tree: KAdaptiveStrategy) -> float:
    """log of the explicit weight of a tree: eta times the summed gains of
    its consistent traces at ``root``.  Brute-force reference for samp()."""
    game = table.game
    B, D = game.n_outcomes, game.n_defender_actions
    K = table.block_len
    offset = [n_tree_nodes(B, length) for length in range(K + 1)]
    total = 0.0
    stack: list[tuple[int, int, int]] = [(0, 0, 0)]
    while stack:
        length, code, base = stack.pop()
        d = tree.actions[offset[length] + code]
        idx = base + d
        total += float(table.losses[root][length + 1][idx])
        if length + 1 < K:
            for o in range(B):
                stack.append((length + 1, code * B + o, idx * (B * D) + o * D))
    return table.eta * total


# =============================================================================
# Implicit weighted majority, perfect information
# =============================================================================


def _tree_hedge_eta(game: Game, block_len: int, horizon: int) -> float:
    nodes = n_tree_nodes(game.n_outcomes, block_len)
    log_n_trees = nodes * math.log(game.n_defender_actions)
    return min(0.5, math.sqrt(game.n_states * log_n_trees / max(1, horizon)))


class TraceHedgeDefender(Defender):
    """Implicit weighted majority over all per-state strategy trees.

    Needs perfect information: every block's observed adversary action script
    is scored against *all* traces rooted at the block's live state, so the
    implicit expert weights stay exactly in sync with an explicit weighted
    majority over the doubly-exponential expert family.
    """

    def __init__(
        self,
        game: Game,
        gamma: float,
        horizon: int,
        *,
        eta: float | None = None,
        cap: int | None = None,
    ):
        if game.kind != BOUNDED_MEMORY:
            raise ValueError("trace learning needs a bounded-memory game")
        if not game.perfect_information:
            raise ValueError(
                "this learner scores blocks from adversary actions; use the "
                "phased variant for imperfect-information games"
            )
        if not 0 < gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {gamma}")
        self.game = game
        self.gamma = gamma
        self.block_len = max(1, math.ceil(game.memory / gamma))
        self.eta = (
            eta if eta is not None else _tree_hedge_eta(game, self.block_len, horizon)
        )
        self.table = TraceTable(game, self.block_len, self.eta, cap=cap)

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        self.table.reset()
        self._rng = rng
        self._root = 0
        self._strategy: KAdaptiveStrategy | None = None
        self._prefix: list[int] = []
        self._advs: list[int] = []

    def act(self, state: int, t: int) -> int:
        if t % self.block_len == 0:
            self._root = state
            self._strategy = samp(self.table, state, self._rng)
            self._prefix = []
            self._advs = []
        return self._strategy.action(self._prefix)

    def observe(self, feedback: StepFeedback) -> None:
        if feedback.adversary_action is None:
            raise RuntimeError("perfect-information feedback required")
        self._advs.append(feedback.adversary_action)
        if len(self._advs) == self.block_len:
            self.table.update(self._root, self._advs)
            self._advs = []
            self._prefix = []
        else:
            self._prefix.append(feedback.outcome)


# =============================================================================
# Phased exploration, imperfect information
# =============================================================================


class PhasedTraceHedgeDefender(Defender):
    """Trace-table learner that survives outcome-only feedback.

    Time is cut into phases of ``ceil(n^(1/gamma) / gamma)`` blocks.  Each of
    the |D|^K action scripts is assigned one uniformly random block of the
    phase (without replacement, so assignments never collide); during its
    block the script is played blindly and each realized prefix trace is
    credited with the observed step reward, inflated so the phase total is
    an unbiased estimate of the sum of the true per-block scores.  All other
    blocks exploit by sampling from the trace weights, which update only at
    phase boundaries.
    """

    def __init__(
        self,
        game: Game,
        gamma: float,
        horizon: int,
        *,
        eta: float | None = None,
        cap: int | None = None,
    ):
        if game.kind != BOUNDED_MEMORY:
            raise ValueError("trace learning needs a bounded-memory game")
        if game.perfect_information:
            raise ValueError(
                "phased exploration is for imperfect-information games; the "
                "non-phased learner is strictly better when actions are visible"
            )
        if not 0 < gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {gamma}")
        self.game = game
        self.gamma = gamma
        self.block_len = max(1, math.ceil(game.memory / gamma))
        B, D = game.n_outcomes, game.n_defender_actions
        self.n_scripts = D**self.block_len
        budget = game.n_states ** (1.0 / gamma)
        self.phase_blocks = math.ceil(budget / gamma)
        if self.n_scripts > budget:
            raise ValueError(
                f"{self.n_scripts} exploration scripts exceed the phase "
                f"budget n^(1/gamma) = {budget:.0f}"
            )
        if self.phase_blocks < self.n_scripts:
            raise ValueError(
                f"phase of {self.phase_blocks} blocks cannot host "
                f"{self.n_scripts} exploration scripts"
            )
        base_eta = (
            eta if eta is not None else _tree_hedge_eta(game, self.block_len, horizon)
        )
        self.eta = base_eta if eta is not None else base_eta / self.phase_blocks
        self.table = TraceTable(game, self.block_len, self.eta, cap=cap)
        self.exploration_blocks = 0
        self.total_blocks = 0

    def reset(self, game: Game, horizon: int, rng: np.random.Generator) -> None:
        self.table.reset()
        self._rng = rng
        self.exploration_blocks = 0
        self.total_blocks = 0
        self.exploration_log: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
        self._block_index = 0
        self._assignment: dict[int, int] = {}
        self._pending: dict[tuple[int, int, int], float] = {}
        self._mode = "exploit"
        self._script: tuple[int, ...] = ()
        self._root = 0
        self._prefix: list[int] = []
        self._step_rewards: list[float] = []
        self._strategy: KAdaptiveStrategy | None = None

    def _lex_script(self, index: int) -> tuple[int, ...]:
        D = self.game.n_defender_actions
        digits = []
        for _ in range(self.block_len):
            digits.append(index % D)
            index //= D
        return tuple(reversed(digits))

    def act(self, state: int, t: int) -> int:
        j = t % self.block_len
        if j == 0:
            position = self._block_index % self.phase_blocks
            if position == 0:
                slots = self._rng.choice(
                    self.phase_blocks, size=self.n_scripts, replace=False
                )
                self._assignment = {int(s): i for i, s in enumerate(slots)}
            self._root = state
            self._prefix = []
            self._step_rewards = []
            script_index = self._assignment.get(position)
            if script_index is not None:
                self._mode = "explore"
                self._script = self._lex_script(script_index)
            else:
                self._mode = "exploit"
                self._strategy = samp(self.table, state, self._rng)
        if self._mode == "explore":
            return self._script[j]
        return self._strategy.action(self._prefix)

    def observe(self, feedback: StepFeedback) -> None:
        self._prefix.append(feedback.outcome)
        self._step_rewards.append(feedback.reward)
        if len(self._prefix) < self.block_len:
            return
        # Block complete.
        self.total_blocks += 1
        if self._mode == "explore":
            self.exploration_blocks += 1
            self.exploration_log.append(
                (self._root, self._script, tuple(self._prefix))
            )
            B, D = self.game.n_outcomes, self.game.n_defender_actions
            idx = self._script[0]
            for depth in range(1, self.block_len + 1):
                if depth > 1:
                    idx = idx * (B * D) + self._prefix[depth - 2] * D + self._script[
                        depth - 1
                    ]
                key = (self._root, depth, idx)
                # A depth-j trace is hit by every script sharing its action
                # prefix, D^(K-j) per phase, so each hit carries 1/D^(K-j)
                # of the phase-length inflation to stay unbiased.
                scale = self.phase_blocks / D ** (self.block_len - depth)
                self._pending[key] = (
                    self._pending.get(key, 0.0)
                    + scale * self._step_rewards[depth - 1]
                )
        self._block_index += 1
        self._prefix = []
        if self._block_index % self.phase_blocks == 0:
            for (root, depth, idx), gain in self._pending.items():
                self.table.add_gain(root, depth, idx, gain)
            self._pending = {}

    @property
    def sampling_overhead(self) -> float:
        """Fraction of blocks spent exploring; at most gamma by construction."""
        if self.total_blocks == 0:
            return 0.0
        return self.exploration_blocks / self.total_blocks
