"""Shared fixtures-by-hand for learner and acceptance tests."""

import numpy as np

from bmglab.games import BOUNDED_MEMORY, Game


def renewal_game() -> Game:
    """Imperfect-information game whose blocks renew at the start state.

    Adversary action 1 forces outcome 0, so any block facing the script
    (0, 1) ends back in the memory-1 window state 0.  That makes exact
    per-phase score targets easy to freeze in tests.
    """
    outcome_probs = np.zeros((2, 2, 2))
    outcome_probs[:, 0] = [[0.3, 0.7], [0.6, 0.4]]
    outcome_probs[:, 1] = [[1.0, 0.0], [1.0, 0.0]]
    payoff = np.array(
        [
            [[0.1, 0.9], [0.5, 0.3]],
            [[0.8, 0.2], [0.4, 0.6]],
        ]
    )
    return Game(
        name="renewal",
        kind=BOUNDED_MEMORY,
        memory=1,
        n_outcomes=2,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=2,
        payoff=payoff,
        outcome_probs=outcome_probs,
        initial_state=0,
        perfect_information=False,
    )


def all_traces(game: Game, block_len: int):
    """Every (root, action stub, outcome stub) combination up to depth K."""
    from itertools import product

    from bmglab.experts import Trace

    traces = []
    for root in range(game.n_states):
        for depth in range(1, block_len + 1):
            for actions in product(range(game.n_defender_actions), repeat=depth):
                for outcomes in product(range(game.n_outcomes), repeat=depth - 1):
                    traces.append(
                        Trace(root=root, actions=actions, outcomes=outcomes)
                    )
    return traces
