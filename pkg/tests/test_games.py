"""State codec, game construction, validation, and config round-trips."""

import json
import math

import numpy as np
import pytest

from bmglab.games import (
    BOUNDED_MEMORY,
    GENERAL_STOCHASTIC,
    Game,
    GameConfigError,
    History,
    SPEEDING_ADVERSARY_TABLE,
    SPEEDING_DEFENDER_TABLE,
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
    outcomes_deterministic,
    speeding_commitment,
    transition,
)
from bmglab.seeding import substream


def test_codec_round_trips_every_state():
    for n_outcomes in (2, 3, 4):
        for memory in (0, 1, 2, 3):
            seen = set()
            for code in range(n_outcomes**memory):
                window = decode_window(code, n_outcomes, memory)
                assert len(window) == memory
                assert all(0 <= o < n_outcomes for o in window)
                assert encode_window(window, n_outcomes) == code
                seen.add(window)
            assert len(seen) == n_outcomes**memory


def test_codec_puts_newest_outcome_in_low_digit():
    # window is oldest-first, so the last element is the low base-B digit
    assert encode_window((1, 0), 2) == 2
    assert encode_window((0, 1), 2) == 1
    assert decode_window(2, 2, 2) == (1, 0)
    assert encode_window((2, 0, 1), 3) == 2 * 9 + 0 * 3 + 1


def test_transition_drops_oldest_and_appends_newest():
    rng = substream(7, "codec")
    for _ in range(200):
        n_outcomes = int(rng.integers(2, 5))
        memory = int(rng.integers(1, 4))
        game = _window_game(n_outcomes, memory)
        state = int(rng.integers(n_outcomes**memory))
        outcome = int(rng.integers(n_outcomes))
        window = decode_window(state, n_outcomes, memory)
        expected = encode_window(window[1:] + (outcome,), n_outcomes)
        assert transition(game, state, outcome) == expected


def test_memory_zero_game_has_single_state():
    game = _window_game(3, 0)
    assert game.n_states == 1
    assert transition(game, 0, 2) == 0
    assert evolve(game, 0, (0, 1, 2)) == 0


def test_window_walk_visits_every_state_once():
    # Feeding one period of a full-coverage outcome cycle from the all-zero
    # window must visit each of the 2^m states exactly once and return.
    game = _window_game(2, 3)
    outcomes = (1, 0, 1, 1, 1, 0, 0, 0)
    state, visited = 0, []
    for o in outcomes:
        state = transition(game, state, o)
        visited.append(state)
    assert visited == [1, 2, 5, 3, 7, 6, 4, 0]
    assert sorted(visited) == list(range(8))
    assert evolve(game, 0, outcomes) == 0


def test_history_window_and_extension():
    h = History((0, 1, 2, 3))
    assert h.window(0) == ()
    assert h.window(2) == (2, 3)
    assert h.window(10) == (0, 1, 2, 3)
    assert h.window(math.inf) == (0, 1, 2, 3)
    assert len(h.extended(4)) == 5
    assert h.extended(4).as_tuple() == (0, 1, 2, 3, 4)
    assert h.as_tuple() == (0, 1, 2, 3)


def test_speeding_game_structure():
    game = build_speeding_game(7)
    assert game.n_states == 128
    assert game.initial_state == 127  # all-LI window: no prior inspections
    assert game.perfect_information
    table = np.asarray(SPEEDING_DEFENDER_TABLE)
    assert np.array_equal(game.payoff, np.broadcast_to(table, (128, 2, 2)))
    # inspections are announced: the outcome is the defender's action
    assert outcomes_deterministic(game)
    for d in (0, 1):
        for a in (0, 1):
            assert game.outcome_probs[d, a, d] == 1.0


def test_speeding_game_small_memory():
    game = build_speeding_game(1)
    assert game.n_states == 2
    assert game.initial_state == 1
    with pytest.raises(ValueError, match="memory"):
        build_speeding_game(-1)


def test_counterexample_game_structure():
    game = build_counterexample_game()
    assert game.kind == GENERAL_STOCHASTIC
    assert game.n_states == game.n_outcomes == 2
    assert game.reward_range == (-1.0, 1.0)
    # stored payoff is the [0, 1] rescale of the raw table
    assert np.array_equal(game.payoff, (game.raw_payoff + 1.0) / 2.0)
    assert game.raw_payoff[0, 0, 0] == -1.0
    assert game.raw_payoff[0, 1, 0] == 0.0
    assert np.all(game.raw_payoff[1] == 1.0)
    # state 1 is absorbing; state 0 leaves only under the joint action (0, 0)
    assert np.all(game.transition_probs[1, :, :, 1] == 1.0)
    assert game.transition_probs[0, 0, 0, 1] == 1.0
    for d in (0, 1):
        for a in (0, 1):
            if (d, a) != (0, 0):
                assert game.transition_probs[0, d, a, 0] == 1.0


def test_tiny_game_flavors():
    assert build_tiny_game().perfect_information
    assert not build_tiny_game(perfect_information=False).perfect_information
    game = build_tiny_game()
    assert game.n_states == game.n_outcomes**game.memory
    rows = game.outcome_probs.reshape(-1, game.n_outcomes)
    assert np.allclose(rows.sum(axis=1), 1.0)


@pytest.mark.parametrize(
    "builder",
    [build_speeding_game, build_counterexample_game, build_tiny_game],
)
def test_config_round_trip(builder):
    game = builder()
    assert game.equals(load_game(game_config(game)))


def test_config_file_round_trip(tmp_path):
    game = build_counterexample_game()
    path = tmp_path / "game.json"
    path.write_text(json.dumps(game_config(game)))
    assert game.equals(load_game_file(str(path)))


def test_load_game_file_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(GameConfigError, match="not valid JSON"):
        load_game_file(str(path))


def test_load_game_rescales_declared_reward_range():
    doc = _minimal_doc()
    doc["reward_range"] = [-1.0, 1.0]
    doc["payoff"] = [[[-1.0, 0.0], [0.5, 1.0]], [[-0.5, 0.25], [0.0, 1.0]]]
    game = load_game(doc)
    assert np.array_equal(
        game.payoff,
        [[[0.0, 0.5], [0.75, 1.0]], [[0.25, 0.625], [0.5, 1.0]]],
    )
    assert np.array_equal(game.raw_payoff, doc["payoff"])
    assert game.reward_range == (-1.0, 1.0)


def test_load_game_default_range_keeps_payoff_verbatim():
    game = load_game(_minimal_doc())
    assert game.raw_payoff is None
    assert game.reward_range == (0.0, 1.0)


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.pop("kind"), "unknown or missing game kind"),
        (lambda d: d.update(kind="markov"), "unknown or missing game kind"),
        (lambda d: d.pop("payoff"), "needs a payoff"),
        (lambda d: d.update(memory=-1), "memory must be a non-negative int"),
        (lambda d: d.update(memory=None), "memory must be a non-negative int"),
        (lambda d: d.pop("outcome_model"), "need an outcome_model"),
        (lambda d: d.update(reward_range=[1.0, 1.0]), "is empty"),
        (lambda d: d.update(payoff=[[[2.0, 0.0], [0.0, 0.0]],
                                    [[0.0, 0.0], [0.0, 0.0]]]),
         "declared reward range"),
        (lambda d: d.update(outcome_model=[[[0.5, 0.4], [0.5, 0.5]],
                                           [[0.5, 0.5], [0.5, 0.5]]]),
         "do not sum to 1"),
        (lambda d: d.update(outcome_model=[[[1.5, -0.5], [0.5, 0.5]],
                                           [[0.5, 0.5], [0.5, 0.5]]]),
         "non-negative"),
        (lambda d: d.update(memory=30), "state guard"),
        (lambda d: d.update(initial_state=9), "initial state 9 out of range"),
    ],
)
def test_load_game_rejects_bad_documents(mutate, message):
    doc = _minimal_doc()
    mutate(doc)
    with pytest.raises(GameConfigError, match=message):
        load_game(doc)


def test_general_game_outcome_is_next_state():
    with pytest.raises(GameConfigError, match="n_outcomes"):
        Game(
            name="bad",
            kind=GENERAL_STOCHASTIC,
            memory=0,
            n_outcomes=3,
            n_defender_actions=2,
            n_adversary_actions=2,
            n_states=2,
            payoff=np.zeros((2, 2, 2)),
            transition_probs=_uniform_transitions(2, 2, 2),
            initial_state=0,
        )


def test_window_game_rejects_wrong_state_count():
    with pytest.raises(GameConfigError, match="n_states == n_outcomes"):
        Game(
            name="bad",
            kind=BOUNDED_MEMORY,
            memory=2,
            n_outcomes=2,
            n_defender_actions=2,
            n_adversary_actions=2,
            n_states=3,
            payoff=np.zeros((3, 2, 2)),
            outcome_probs=_uniform_outcomes(2, 2, 2),
            initial_state=0,
        )


def test_explicit_transition_table_frees_state_count():
    # a transition table decouples n_states from n_outcomes ** memory
    table = np.array([[1, 2], [2, 0], [0, 1]])
    game = Game(
        name="triangle",
        kind=BOUNDED_MEMORY,
        memory=1,
        n_outcomes=2,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=3,
        payoff=np.zeros((3, 2, 2)),
        outcome_probs=_uniform_outcomes(2, 2, 2),
        state_transitions=table,
        initial_state=0,
    )
    assert transition(game, 0, 1) == 2
    assert evolve(game, 0, (0, 0, 1)) == 1
    bad = table.copy()
    bad[0, 0] = 5
    with pytest.raises(GameConfigError, match="out of range"):
        Game(
            name="triangle",
            kind=BOUNDED_MEMORY,
            memory=1,
            n_outcomes=2,
            n_defender_actions=2,
            n_adversary_actions=2,
            n_states=3,
            payoff=np.zeros((3, 2, 2)),
            outcome_probs=_uniform_outcomes(2, 2, 2),
            state_transitions=bad,
            initial_state=0,
        )


def test_stored_payoffs_must_be_normalized():
    with pytest.raises(GameConfigError, match="must lie in \\[0, 1\\]"):
        Game(
            name="bad",
            kind=BOUNDED_MEMORY,
            memory=0,
            n_outcomes=2,
            n_defender_actions=2,
            n_adversary_actions=2,
            n_states=1,
            payoff=np.full((1, 2, 2), 1.5),
            outcome_probs=_uniform_outcomes(2, 2, 2),
            initial_state=0,
        )


def test_speeding_commitment_is_exact():
    sol = speeding_commitment()
    # indifference sits at Pr[HI] = 0.2; the defender then collects
    # 0.2 * 0.7 + 0.8 * 1.0 against the favorable tie-break
    assert sol.value == 0.94
    assert sol.commit == 0.2
    assert sol.best_response == 1
    assert commitment_value(
        SPEEDING_DEFENDER_TABLE, SPEEDING_ADVERSARY_TABLE
    ).value == 0.94


def test_commitment_value_degenerate_column():
    # one column dominates everywhere: commit collapses to the better row
    sol = commitment_value(((0.3, 0.1), (0.6, 0.2)), ((0.0, 1.0), (0.0, 1.0)))
    assert sol.best_response == 1
    assert sol.value == 0.2
    assert sol.commit == 0.0


def _window_game(n_outcomes: int, memory: int) -> Game:
    n = n_outcomes**memory
    return Game(
        name=f"w{n_outcomes}m{memory}",
        kind=BOUNDED_MEMORY,
        memory=memory,
        n_outcomes=n_outcomes,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=n,
        payoff=np.zeros((n, 2, 2)),
        outcome_probs=_uniform_outcomes(2, 2, n_outcomes),
        initial_state=0,
    )


def _uniform_outcomes(n_d: int, n_a: int, n_o: int) -> np.ndarray:
    return np.full((n_d, n_a, n_o), 1.0 / n_o)


def _uniform_transitions(n: int, n_d: int, n_a: int) -> np.ndarray:
    return np.full((n, n_d, n_a, n), 1.0 / n)


def _minimal_doc() -> dict:
    return {
        "name": "doc-game",
        "kind": BOUNDED_MEMORY,
        "memory": 1,
        "outcomes": 2,
        "defender_actions": 2,
        "adversary_actions": 2,
        "payoff": [[[0.1, 0.2], [0.3, 0.4]], [[0.5, 0.6], [0.7, 0.8]]],
        "outcome_model": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.5], [0.5, 0.5]]],
    }
