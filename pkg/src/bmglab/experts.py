"""Defender strategy classes: fixed state maps, depth-K trees, composites.

A fixed strategy maps every state to an action.  A K-adaptive strategy is a
complete decision tree of depth K over outcome prefixes: its j-th action may
depend on the j-1 outcomes observed since the tree was entered.  A composite
expert assigns one such tree to every state and, during block play, restarts
the tree of the live state at each block boundary.

Tree nodes are keyed by outcome prefix, packed as ``offset(len) + code``
where ``code`` puts the most recent outcome in the least-significant digit
(the same convention as the state codec).  Enumeration walks nodes in that
order, so strategy lists are lexicographic and reproducible.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .games import Game, decode_window, encode_window, evolve

DEFAULT_STRATEGY_CAP = 2**20
DEFAULT_TRACE_CAP = 10**7
_CAP_ENV = "BMG_LAB_CAP"


def enumeration_cap(default: int) -> int:
    """Active enumeration cap; the BMG_LAB_CAP env var overrides defaults."""
    raw = os.environ.get(_CAP_ENV)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{_CAP_ENV} must be an integer, got {raw!r}") from exc


# =============================================================================
# Strategy types
# =============================================================================


@dataclass(frozen=True)
class FixedStrategy:
    """A pure state-to-action map.

    Attributes:
        actions: Action per state code; total over all states.
    """

    actions: tuple[int, ...]

    def action(self, state: int) -> int:
        return self.actions[state]


def n_tree_nodes(n_outcomes: int, depth: int) -> int:
    """Number of decision points in a complete depth-``depth`` tree."""
    return sum(n_outcomes**j for j in range(depth))


def prefix_node(prefix: Sequence[int], n_outcomes: int) -> int:
    """Node index of an outcome prefix: nodes ordered by length, then code."""
    return n_tree_nodes(n_outcomes, len(prefix)) + encode_window(prefix, n_outcomes)


@dataclass(frozen=True)
class KAdaptiveStrategy:
    """A complete depth-K decision tree over outcome prefixes.

    Attributes:
        depth: K; the tree supplies actions for prefixes of length < K.
        n_outcomes: Branching alphabet size.
        actions: One action per node, in (length, code) node order.
    """

    depth: int
    n_outcomes: int
    actions: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = n_tree_nodes(self.n_outcomes, self.depth)
        if len(self.actions) != expected:
            raise ValueError(
                f"depth-{self.depth} tree over {self.n_outcomes} outcomes needs "
                f"{expected} actions, got {len(self.actions)}"
            )

    def action(self, prefix: Sequence[int]) -> int:
        """Action after observing ``prefix`` outcomes within the block."""
        if len(prefix) >= self.depth:
            raise ValueError(
                f"prefix of length {len(prefix)} exhausts a depth-{self.depth} tree"
            )
        return self.actions[prefix_node(prefix, self.n_outcomes)]


@dataclass(frozen=True)
class CompositeExpert:
    """One depth-K tree per state; block play restarts at the live state.

    Attributes:
        per_state: Tree for each state code.
    """

    per_state: tuple[KAdaptiveStrategy, ...]

    @property
    def depth(self) -> int:
        return self.per_state[0].depth

    def tree(self, state: int) -> KAdaptiveStrategy:
        return self.per_state[state]


class Trace(NamedTuple):
    """A root state plus an alternating action/outcome stub of some depth.

    ``actions`` holds d^1..d^i and ``outcomes`` holds the i-1 outcomes
    observed between them.
    """

    root: int
    actions: tuple[int, ...]
    outcomes: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.actions)


# =============================================================================
# Conversions and trace extraction
# =============================================================================


def fixed_as_composite(game: Game, strategy: FixedStrategy, depth: int) -> CompositeExpert:
    """Unrolls a fixed strategy into per-state depth-``depth`` trees.

    The tree rooted at state s plays the fixed strategy on the state reached
    from s by the outcomes observed so far, so block play of the result is
    identical to playing the fixed strategy round by round.
    """
    if len(strategy.actions) != game.n_states:
        raise ValueError(
            f"strategy covers {len(strategy.actions)} states, game has {game.n_states}"
        )
    trees = []
    for root in range(game.n_states):
        actions = []
        for length in range(depth):
            for prefix in itertools.product(range(game.n_outcomes), repeat=length):
                actions.append(strategy.action(evolve(game, root, prefix)))
        trees.append(
            KAdaptiveStrategy(
                depth=depth, n_outcomes=game.n_outcomes, actions=tuple(actions)
            )
        )
    return CompositeExpert(per_state=tuple(trees))


def consistent_traces(expert: CompositeExpert, game: Game) -> list[Trace]:
    """All traces some play-through of the expert could realize.

    One trace per (root, outcome prefix): the actions along it are forced by
    the expert, so each root contributes sum_{j<K} |O|^j traces.
    """
    traces = []
    for root, tree in enumerate(expert.per_state):
        for length in range(tree.depth):
            for prefix in itertools.product(range(game.n_outcomes), repeat=length):
                actions = tuple(
                    tree.action(prefix[:j]) for j in range(length + 1)
                )
                traces.append(Trace(root=root, actions=actions, outcomes=prefix))
    return traces


# =============================================================================
# Enumeration
# =============================================================================


def count_fixed_strategies(game: Game) -> int:
    return game.n_defender_actions**game.n_states


def count_k_adaptive(game: Game, depth: int) -> int:
    return game.n_defender_actions ** n_tree_nodes(game.n_outcomes, depth)


def count_composite(game: Game, depth: int) -> int:
    return count_k_adaptive(game, depth) ** game.n_states


def _check_cap(count: int, cap: int | None, what: str) -> None:
    limit = enumeration_cap(DEFAULT_STRATEGY_CAP) if cap is None else cap
    if count > limit:
        raise ValueError(
            f"enumerating {count} {what} exceeds the cap of {limit}; "
            f"raise {_CAP_ENV} or pass a larger cap to proceed"
        )


def enumerate_fixed_strategies(game: Game, cap: int | None = None) -> list[FixedStrategy]:
    """All fixed strategies in lexicographic table order.

    The first entry plays action 0 everywhere.  Raises with the offending
    count when it exceeds the cap.
    """
    _check_cap(count_fixed_strategies(game), cap, "fixed strategies")
    return [
        FixedStrategy(actions=actions)
        for actions in itertools.product(
            range(game.n_defender_actions), repeat=game.n_states
        )
    ]


def enumerate_k_adaptive(
    game: Game, depth: int, cap: int | None = None
) -> list[KAdaptiveStrategy]:
    """All depth-``depth`` trees in lexicographic action order."""
    _check_cap(count_k_adaptive(game, depth), cap, "strategy trees")
    nodes = n_tree_nodes(game.n_outcomes, depth)
    return [
        KAdaptiveStrategy(depth=depth, n_outcomes=game.n_outcomes, actions=actions)
        for actions in itertools.product(range(game.n_defender_actions), repeat=nodes)
    ]


def enumerate_composite_experts(
    game: Game, depth: int, cap: int | None = None
) -> list[CompositeExpert]:
    """All composite experts; the count is (trees per root) ** n_states."""
    _check_cap(count_composite(game, depth), cap, "composite experts")
    trees = enumerate_k_adaptive(game, depth, cap=None)
    return [
        CompositeExpert(per_state=combo)
        for combo in itertools.product(trees, repeat=game.n_states)
    ]


# =============================================================================
# Named strategies for the speeding audit game
# =============================================================================


def speeding_always_li(game: Game) -> FixedStrategy:
    """Light inspection in every state."""
    return FixedStrategy(actions=(1,) * game.n_states)


def speeding_hi_every_kth(game: Game) -> FixedStrategy:
    """Heavy inspection on a fixed k-day cycle, expressed as a state map.

    Plays HI exactly when no HI appears among the k-1 most recent outcomes.
    Keying on the full k-window instead would re-trigger one day late (period
    k+1), because the day's own HI stays visible for k rounds.
    """
    if game.n_outcomes != 2 or game.state_transitions is not None:
        raise ValueError("expects a plain binary-outcome window game")
    k = game.memory
    actions = []
    for state in range(game.n_states):
        window = decode_window(state, 2, k)
        actions.append(0 if 0 not in window[1:] else 1)
    return FixedStrategy(actions=tuple(actions))
