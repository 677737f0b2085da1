"""Core game types for bounded-memory and small general stochastic games.

A bounded-memory game with memory ``m`` has one state per window of the
``m`` most recent public outcomes.  The state is therefore a pure function
of (previous state, realized outcome), and for the plain window encoding
the transition is a base-``|O|`` shift.  Games whose state is a coarser
function of the outcome window (still memory-``m``) may supply an explicit
``state_transitions`` table instead.

General stochastic games drop the outcome structure entirely and move
between states via an explicit per-(state, action pair) distribution; the
publicly observed "outcome" of a round is then the next state.

All stored payoffs live in [0, 1].  Games declared over a wider reward
range are affinely rescaled at construction and keep the raw table around
for reporting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

BOUNDED_MEMORY = "bounded-memory"
GENERAL_STOCHASTIC = "general-stochastic"

_PROB_TOL = 1e-12
_STATE_GUARD = 2**24


class GameConfigError(ValueError):
    """Raised when a game document fails schema or consistency validation."""


# =============================================================================
# Histories
# =============================================================================


@dataclass(frozen=True)
class History:
    """An ordered record of realized public outcomes.

    Attributes:
        outcomes: Outcome indices in chronological order, oldest first.  May
            wrap a live buffer the simulation loop keeps appending to, so
            strategies must read what they need when called rather than hold
            the history across rounds.
    """

    outcomes: Sequence[int] = ()

    def __len__(self) -> int:
        return len(self.outcomes)

    def window(self, k: float) -> tuple[int, ...]:
        """Returns the min(k, len) most recent outcomes, oldest first.

        Args:
            k: Window length; ``math.inf`` returns the full history.
        """
        if k <= 0:
            return ()
        n = len(self.outcomes)
        k = n if k >= n else int(k)
        return tuple(self.outcomes[n - k :])

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.outcomes)

    def extended(self, outcome: int) -> "History":
        """Returns a new history with one more outcome appended."""
        return History(tuple(self.outcomes) + (outcome,))


# =============================================================================
# Game type
# =============================================================================


@dataclass(frozen=True, eq=False)
class Game:
    """A two-player game between a defender and an adversary.

    Attributes:
        name: Identifier used in reports and CSV headers.
        kind: ``"bounded-memory"`` or ``"general-stochastic"``.
        memory: Number of recent outcomes the state depends on (bounded kind).
        n_outcomes: Size of the public outcome alphabet.
        n_defender_actions: Size of the defender action set.
        n_adversary_actions: Size of the adversary action set.
        n_states: Number of states.
        payoff: Defender payoff table, shape (n_states, D, A), values in [0, 1].
        outcome_probs: Outcome distribution per action pair, shape (D, A, O);
            bounded kind only.
        state_transitions: Optional explicit next-state table, shape
            (n_states, O).  ``None`` selects the plain window codec, in which
            case ``n_states == n_outcomes ** memory``.
        transition_probs: Next-state distribution per (state, d, a), shape
            (n_states, D, A, n_states); general kind only.
        initial_state: State the game starts in.
        perfect_information: Whether the defender observes adversary actions.
        reward_range: Declared raw reward range before rescaling to [0, 1].
        raw_payoff: Original payoff table when a rescale was applied.
    """

    name: str
    kind: str
    memory: int
    n_outcomes: int
    n_defender_actions: int
    n_adversary_actions: int
    n_states: int
    payoff: np.ndarray
    outcome_probs: np.ndarray | None = None
    state_transitions: np.ndarray | None = None
    transition_probs: np.ndarray | None = None
    initial_state: int = 0
    perfect_information: bool = True
    reward_range: tuple[float, float] = (0.0, 1.0)
    raw_payoff: np.ndarray | None = None
    defender_action_labels: tuple[str, ...] | None = None
    adversary_action_labels: tuple[str, ...] | None = None
    outcome_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in (BOUNDED_MEMORY, GENERAL_STOCHASTIC):
            raise GameConfigError(f"unknown game kind {self.kind!r}")
        if self.memory < 0:
            raise GameConfigError(f"memory must be >= 0, got {self.memory}")
        for label, count in (
            ("outcomes", self.n_outcomes),
            ("defender actions", self.n_defender_actions),
            ("adversary actions", self.n_adversary_actions),
            ("states", self.n_states),
        ):
            if count < 1:
                raise GameConfigError(f"need at least one {label[:-1]}, got {count}")
        shape = (self.n_states, self.n_defender_actions, self.n_adversary_actions)
        if self.payoff.shape != shape:
            raise GameConfigError(
                f"payoff table has shape {self.payoff.shape}, expected {shape}"
            )
        if np.any(self.payoff < -_PROB_TOL) or np.any(self.payoff > 1 + _PROB_TOL):
            raise GameConfigError("stored payoffs must lie in [0, 1]")
        if not 0 <= self.initial_state < self.n_states:
            raise GameConfigError(f"initial state {self.initial_state} out of range")

        if self.kind == BOUNDED_MEMORY:
            if self.outcome_probs is None:
                raise GameConfigError("bounded-memory games need an outcome model")
            oshape = (
                self.n_defender_actions,
                self.n_adversary_actions,
                self.n_outcomes,
            )
            if self.outcome_probs.shape != oshape:
                raise GameConfigError(
                    f"outcome model has shape {self.outcome_probs.shape}, "
                    f"expected {oshape}"
                )
            _check_rows_normalized(self.outcome_probs.reshape(-1, self.n_outcomes))
            if self.transition_probs is not None:
                raise GameConfigError(
                    "bounded-memory games may not carry a state transition "
                    "distribution"
                )
            if self.state_transitions is None:
                if self.n_states != self.n_outcomes**self.memory:
                    raise GameConfigError(
                        f"window games need n_states == n_outcomes ** memory, "
                        f"got {self.n_states} != {self.n_outcomes**self.memory}"
                    )
            else:
                tshape = (self.n_states, self.n_outcomes)
                if self.state_transitions.shape != tshape:
                    raise GameConfigError(
                        f"state transition table has shape "
                        f"{self.state_transitions.shape}, expected {tshape}"
                    )
                if np.any(self.state_transitions < 0) or np.any(
                    self.state_transitions >= self.n_states
                ):
                    raise GameConfigError("state transition table entry out of range")
        else:
            if self.transition_probs is None:
                raise GameConfigError(
                    "general-stochastic games need a state transition distribution"
                )
            tshape = shape + (self.n_states,)
            if self.transition_probs.shape != tshape:
                raise GameConfigError(
                    f"transition distribution has shape "
                    f"{self.transition_probs.shape}, expected {tshape}"
                )
            _check_rows_normalized(self.transition_probs.reshape(-1, self.n_states))
            if self.outcome_probs is not None or self.state_transitions is not None:
                raise GameConfigError(
                    "general-stochastic games may not carry an outcome model"
                )
            if self.n_outcomes != self.n_states:
                raise GameConfigError(
                    "general-stochastic games publish the next state as the "
                    f"round outcome, so n_outcomes ({self.n_outcomes}) must "
                    f"equal n_states ({self.n_states})"
                )

    def equals(self, other: "Game") -> bool:
        """Structural equality; array fields compared elementwise."""
        if not isinstance(other, Game):
            return False
        scalars = (
            "name",
            "kind",
            "memory",
            "n_outcomes",
            "n_defender_actions",
            "n_adversary_actions",
            "n_states",
            "initial_state",
            "perfect_information",
            "reward_range",
            "defender_action_labels",
            "adversary_action_labels",
            "outcome_labels",
        )
        if any(getattr(self, f) != getattr(other, f) for f in scalars):
            return False
        arrays = ("payoff", "outcome_probs", "state_transitions", "transition_probs", "raw_payoff")
        for f in arrays:
            a, b = getattr(self, f), getattr(other, f)
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        return True


def _check_rows_normalized(rows: np.ndarray) -> None:
    if np.any(rows < 0):
        raise GameConfigError("probabilities must be non-negative")
    bad = np.abs(rows.sum(axis=1) - 1.0) > _PROB_TOL
    if np.any(bad):
        raise GameConfigError(
            f"probability row(s) {np.flatnonzero(bad).tolist()} do not sum to 1"
        )


# =============================================================================
# Window codec and transitions
# =============================================================================


def encode_window(window: Sequence[int], n_outcomes: int) -> int:
    """Packs an outcome window into a state code.

    The window is chronological (oldest first); the most recent outcome lands
    in the least-significant base-``n_outcomes`` digit.
    """
    code = 0
    for o in window:
        if not 0 <= o < n_outcomes:
            raise ValueError(f"outcome {o} out of range [0, {n_outcomes})")
        code = code * n_outcomes + o
    return code


def decode_window(code: int, n_outcomes: int, memory: int) -> tuple[int, ...]:
    """Unpacks a state code into its outcome window, oldest first."""
    if not 0 <= code < n_outcomes**memory:
        raise ValueError(f"state code {code} out of range for memory {memory}")
    window = []
    for _ in range(memory):
        window.append(code % n_outcomes)
        code //= n_outcomes
    return tuple(reversed(window))


def transition(game: Game, state: int, outcome: int) -> int:
    """Returns the successor state after observing ``outcome``.

    For plain window games this shifts the window by one and appends the new
    outcome as the most recent digit.  Games with an explicit state table use
    the table.

    Raises:
        ValueError: For general-stochastic games, whose transitions are
            stochastic in the joint actions rather than outcome-driven.
    """
    if game.kind != BOUNDED_MEMORY:
        raise ValueError("transition() is only defined for bounded-memory games")
    if not 0 <= state < game.n_states:
        raise ValueError(f"state {state} out of range")
    if not 0 <= outcome < game.n_outcomes:
        raise ValueError(f"outcome {outcome} out of range")
    if game.state_transitions is not None:
        return int(game.state_transitions[state, outcome])
    return (state * game.n_outcomes + outcome) % game.n_states


def evolve(game: Game, state: int, outcomes: Sequence[int]) -> int:
    """Pushes a sequence of outcomes through the transition function."""
    for o in outcomes:
        state = transition(game, state, o)
    return state


def outcomes_deterministic(game: Game) -> bool:
    """True when every outcome (or next-state) distribution is a point mass."""
    if game.kind == BOUNDED_MEMORY:
        rows = game.outcome_probs.reshape(-1, game.n_outcomes)
    else:
        rows = game.transition_probs.reshape(-1, game.n_states)
    return bool(np.all(rows.max(axis=1) >= 1.0 - _PROB_TOL))


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draws an index from a probability row without re-validating it."""
    top = int(np.argmax(probs))
    if probs[top] >= 1.0 - _PROB_TOL:
        return top
    return int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))


def step(
    game: Game, state: int, d: int, a: int, rng: np.random.Generator
) -> tuple[int, int, float]:
    """Plays one round from ``state`` with actions (d, a).

    Args:
        game: The game.
        state: Current state code.
        d: Defender action index.
        a: Adversary action index.
        rng: Generator supplying the outcome draw.

    Returns:
        (outcome, next_state, reward); the reward is the stored [0, 1] payoff
        at the current state, which is independent of the realized outcome.
    """
    if not 0 <= d < game.n_defender_actions:
        raise ValueError(f"defender action {d} out of range")
    if not 0 <= a < game.n_adversary_actions:
        raise ValueError(f"adversary action {a} out of range")
    if not 0 <= state < game.n_states:
        raise ValueError(f"state {state} out of range")
    reward = float(game.payoff[state, d, a])
    if game.kind == BOUNDED_MEMORY:
        outcome = sample_index(game.outcome_probs[d, a], rng)
        return outcome, transition(game, state, outcome), reward
    nxt = sample_index(game.transition_probs[state, d, a], rng)
    return nxt, nxt, reward


# =============================================================================
# Built-in games
# =============================================================================

# Speeding audit stage payoffs.  Rows: defender HI=0, LI=1.  Columns:
# adversary S=0, DS=1.  The (HI, S) entry is 0.19, not 0.09; kept verbatim.
SPEEDING_DEFENDER_TABLE = ((0.19, 0.7), (0.2, 1.0))
SPEEDING_ADVERSARY_TABLE = ((0.0, 0.8), (1.0, 0.8))

HI, LI = 0, 1
S, DS = 0, 1


def build_speeding_game(k: int = 7) -> Game:
    """Builds the speeding-audit game with memory ``k``.

    The public outcome of a round is the defender's own action (inspections
    are announced), so the state is the window of the last ``k`` inspection
    levels.  The game starts from the all-LI window: nobody was heavily
    inspected before the game began.
    """
    if k < 0:
        raise ValueError(f"memory must be >= 0, got {k}")
    n = 2**k
    payoff = np.broadcast_to(
        np.asarray(SPEEDING_DEFENDER_TABLE, dtype=float), (n, 2, 2)
    ).copy()
    outcome_probs = np.zeros((2, 2, 2))
    for d in (HI, LI):
        outcome_probs[d, :, d] = 1.0
    return Game(
        name=f"speeding-k{k}",
        kind=BOUNDED_MEMORY,
        memory=k,
        n_outcomes=2,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=n,
        payoff=payoff,
        outcome_probs=outcome_probs,
        initial_state=n - 1,
        perfect_information=True,
        defender_action_labels=("HI", "LI"),
        adversary_action_labels=("S", "DS"),
        outcome_labels=("HI", "LI"),
    )


def build_counterexample_game() -> Game:
    """Two-state general stochastic game with no low-regret defender.

    State 1 is absorbing and is only reached from state 0 by the joint action
    (d0, a0).  Raw rewards are -1 for d0 and 0 for d1 in state 0, and 1 for
    everything in state 1; stored payoffs are the [0, 1] rescale.
    """
    raw = np.array(
        [
            [[-1.0, -1.0], [0.0, 0.0]],
            [[1.0, 1.0], [1.0, 1.0]],
        ]
    )
    trans = np.zeros((2, 2, 2, 2))
    trans[0, :, :, 0] = 1.0
    trans[0, 0, 0] = (0.0, 1.0)
    trans[1, :, :, 1] = 1.0
    return Game(
        name="counterexample",
        kind=GENERAL_STOCHASTIC,
        memory=0,
        n_outcomes=2,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=2,
        payoff=(raw + 1.0) / 2.0,
        transition_probs=trans,
        initial_state=0,
        reward_range=(-1.0, 1.0),
        raw_payoff=raw,
        defender_action_labels=("d1", "d2"),
        adversary_action_labels=("a1", "a2"),
    )


def build_tiny_game(perfect_information: bool = True) -> Game:
    """Fixed two-state stochastic game used by sampler diagnostics and tests.

    Memory 1 over a binary outcome alphabet, two actions per side, a mildly
    skewed outcome model, and state-dependent payoffs.  The constants are
    arbitrary but frozen: diagnostics compare empirical and enumerated
    distributions on this exact game.
    """
    outcome_probs = np.array(
        [
            [[0.7, 0.3], [0.4, 0.6]],
            [[0.2, 0.8], [0.55, 0.45]],
        ]
    )
    payoff = np.array(
        [
            [[0.1, 0.9], [0.5, 0.3]],
            [[0.8, 0.2], [0.4, 0.6]],
        ]
    )
    return Game(
        name="tiny" if perfect_information else "tiny-imperfect",
        kind=BOUNDED_MEMORY,
        memory=1,
        n_outcomes=2,
        n_defender_actions=2,
        n_adversary_actions=2,
        n_states=2,
        payoff=payoff,
        outcome_probs=outcome_probs,
        initial_state=0,
        perfect_information=perfect_information,
    )


# =============================================================================
# Commitment value for one-shot matrix games
# =============================================================================


@dataclass(frozen=True)
class CommitmentSolution:
    """Optimal mixed commitment for the row player of a 2 x A matrix game.

    Attributes:
        value: Row player's expected payoff under the optimal commitment.
        commit: Probability placed on row action 0.
        best_response: Column action the adversary plays (ties broken in the
            row player's favor).
    """

    value: float
    commit: float
    best_response: int


def commitment_value(
    defender_table: Sequence[Sequence[float]],
    adversary_table: Sequence[Sequence[float]],
) -> CommitmentSolution:
    """Solves for the optimal defender commitment in a 2 x A one-shot game.

    The defender commits to a mixture over its two actions; the adversary
    best-responds, breaking ties in the defender's favor.  Computed in exact
    rational arithmetic: the commitment boundary sits where the adversary is
    indifferent, and float candidates there are unreliable.
    """
    dt = [[Fraction(str(v)) for v in row] for row in defender_table]
    at = [[Fraction(str(v)) for v in row] for row in adversary_table]
    if len(dt) != 2 or len(at) != 2:
        raise ValueError("commitment_value expects exactly two defender actions")
    n_a = len(dt[0])
    best: tuple[Fraction, Fraction, int] | None = None
    for a in range(n_a):
        # Interval of q = Pr[action 0] where column a is a best response.
        lo, hi = Fraction(0), Fraction(1)
        feasible = True
        for other in range(n_a):
            if other == a:
                continue
            # q*at[0][a] + (1-q)*at[1][a] >= q*at[0][other] + (1-q)*at[1][other]
            coef = (at[0][a] - at[1][a]) - (at[0][other] - at[1][other])
            const = at[1][a] - at[1][other]
            if coef > 0:
                lo = max(lo, -const / coef)
            elif coef < 0:
                hi = min(hi, -const / coef)
            elif const < 0:
                feasible = False
        if not feasible or lo > hi:
            continue
        for q in (lo, hi):
            value = q * dt[0][a] + (1 - q) * dt[1][a]
            if best is None or value > best[0]:
                best = (value, q, a)
    assert best is not None, "some column must be a best response somewhere"
    return CommitmentSolution(
        value=float(best[0]), commit=float(best[1]), best_response=best[2]
    )


def speeding_commitment() -> CommitmentSolution:
    """Optimal one-shot inspection commitment for the speeding audit game."""
    return commitment_value(SPEEDING_DEFENDER_TABLE, SPEEDING_ADVERSARY_TABLE)


# =============================================================================
# Config documents
# =============================================================================


def _action_space(value: object, what: str) -> tuple[int, tuple[str, ...] | None]:
    if isinstance(value, int):
        if value < 1:
            raise GameConfigError(f"{what} count must be >= 1, got {value}")
        return value, None
    if isinstance(value, list) and value and all(isinstance(v, str) for v in value):
        return len(value), tuple(value)
    raise GameConfigError(f"{what} must be a count or a list of labels")


def _payoff_array(spec: object, n: int, n_d: int, n_a: int) -> np.ndarray:
    if isinstance(spec, dict):
        expr = spec.get("expression")
        if not isinstance(expr, str):
            raise GameConfigError("payoff object must carry an 'expression' string")
        code = compile(expr, "<payoff>", "eval")
        table = np.empty((n, n_d, n_a))
        env = {"min": min, "max": max, "abs": abs}
        for s in range(n):
            for d in range(n_d):
                for a in range(n_a):
                    table[s, d, a] = float(
                        eval(code, {"__builtins__": {}}, {**env, "state": s, "d": d, "a": a})
                    )
        return table
    arr = np.asarray(spec, dtype=float)
    if arr.shape == (n_d, n_a):
        return np.broadcast_to(arr, (n, n_d, n_a)).copy()
    if arr.shape == (n, n_d, n_a):
        return arr
    raise GameConfigError(
        f"payoff table has shape {arr.shape}, expected {(n_d, n_a)} or {(n, n_d, n_a)}"
    )


def load_game(doc: dict) -> Game:
    """Builds a validated Game from a plain config document.

    Raises:
        GameConfigError: On any schema violation, unnormalized distribution,
            out-of-range payoff, or state-space overflow.
    """
    if not isinstance(doc, dict):
        raise GameConfigError("game document must be a mapping")
    kind = doc.get("kind")
    if kind not in (BOUNDED_MEMORY, GENERAL_STOCHASTIC):
        raise GameConfigError(f"unknown or missing game kind {kind!r}")
    n_d, d_labels = _action_space(doc.get("defender_actions"), "defender_actions")
    n_a, a_labels = _action_space(doc.get("adversary_actions"), "adversary_actions")
    if "payoff" not in doc:
        raise GameConfigError("game document needs a payoff table or expression")
    rng_spec = doc.get("reward_range", (0.0, 1.0))
    try:
        lo, hi = (float(v) for v in rng_spec)
    except (TypeError, ValueError) as exc:
        raise GameConfigError(f"reward_range must be a [lo, hi] pair: {exc}") from exc
    if not hi > lo:
        raise GameConfigError(f"reward range [{lo}, {hi}] is empty")

    if kind == BOUNDED_MEMORY:
        n_o, o_labels = _action_space(doc.get("outcomes"), "outcomes")
        memory = doc.get("memory")
        if not isinstance(memory, int) or memory < 0:
            raise GameConfigError(f"memory must be a non-negative int, got {memory!r}")
        state_transitions = None
        if "state_transitions" in doc:
            state_transitions = np.asarray(doc["state_transitions"], dtype=np.int64)
            n = int(doc.get("states", state_transitions.shape[0]))
        else:
            if n_o**memory > _STATE_GUARD:
                raise GameConfigError(
                    f"{n_o}^{memory} states exceeds the {_STATE_GUARD} state guard"
                )
            n = n_o**memory
        if "outcome_model" not in doc:
            raise GameConfigError("bounded-memory games need an outcome_model table")
        outcome_probs = np.asarray(doc["outcome_model"], dtype=float)
        transition_probs = None
    else:
        memory = 0
        if "transition_model" not in doc:
            raise GameConfigError(
                "general-stochastic games need a transition_model table"
            )
        transition_probs = np.asarray(doc["transition_model"], dtype=float)
        n = transition_probs.shape[0] if transition_probs.ndim == 4 else 0
        if n < 1:
            raise GameConfigError("transition_model must be a 4-d table")
        n_o, o_labels = n, None
        outcome_probs = None
        state_transitions = None
    if n > _STATE_GUARD:
        raise GameConfigError(f"{n} states exceeds the {_STATE_GUARD} state guard")

    raw = _payoff_array(doc.get("payoff"), n, n_d, n_a)
    if np.any(raw < lo - _PROB_TOL) or np.any(raw > hi + _PROB_TOL):
        raise GameConfigError(
            f"payoffs must lie in the declared reward range [{lo}, {hi}]"
        )
    if (lo, hi) == (0.0, 1.0):
        payoff, raw_payoff = raw, None
    else:
        payoff, raw_payoff = (raw - lo) / (hi - lo), raw

    return Game(
        name=str(doc.get("name", "game")),
        kind=kind,
        memory=memory,
        n_outcomes=n_o,
        n_defender_actions=n_d,
        n_adversary_actions=n_a,
        n_states=n,
        payoff=payoff,
        outcome_probs=outcome_probs,
        state_transitions=state_transitions,
        transition_probs=transition_probs,
        initial_state=int(doc.get("initial_state", 0)),
        perfect_information=bool(doc.get("perfect_information", True)),
        reward_range=(lo, hi),
        raw_payoff=raw_payoff,
        defender_action_labels=d_labels,
        adversary_action_labels=a_labels,
        outcome_labels=o_labels,
    )


def game_config(game: Game) -> dict:
    """Serializes a Game back to a loadable config document."""
    doc: dict = {
        "name": game.name,
        "kind": game.kind,
        "defender_actions": list(game.defender_action_labels)
        if game.defender_action_labels
        else game.n_defender_actions,
        "adversary_actions": list(game.adversary_action_labels)
        if game.adversary_action_labels
        else game.n_adversary_actions,
        "reward_range": list(game.reward_range),
        "initial_state": game.initial_state,
        "perfect_information": game.perfect_information,
    }
    table = game.raw_payoff if game.raw_payoff is not None else game.payoff
    doc["payoff"] = table.tolist()
    if game.kind == BOUNDED_MEMORY:
        doc["memory"] = game.memory
        doc["outcomes"] = (
            list(game.outcome_labels) if game.outcome_labels else game.n_outcomes
        )
        doc["outcome_model"] = game.outcome_probs.tolist()
        if game.state_transitions is not None:
            doc["states"] = game.n_states
            doc["state_transitions"] = game.state_transitions.tolist()
    else:
        doc["transition_model"] = game.transition_probs.tolist()
    return doc


def load_game_file(path: str) -> Game:
    """Reads a JSON game document from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameConfigError(f"{path} is not valid JSON: {exc}") from exc
    return load_game(doc)
