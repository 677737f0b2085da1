"""Adversary strategies, bounded-adaptiveness structure, and replay tools.

A k-adaptive adversary bases its action on at most the last
``i = t mod (k + 1)`` outcomes: its knowledge resets every ``k + 1`` rounds,
like a stream of short-stay visitors who each observe only their own stay.
``k = 0`` is an oblivious adversary (a function of the round index alone) and
``k = inf`` is fully adaptive.

``hypothetical_k_adaptive`` builds the counterfactual opponent used for
regret measurement: given one recorded play-through of a real adversary, it
answers "what would the adversary have done against a different history",
by splicing the recorded prefix with the queried window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .games import History

FULLY_ADAPTIVE = math.inf


@dataclass(frozen=True)
class AdversaryStrategy:
    """An adversary as a deterministic function of the outcome history.

    Attributes:
        act: Maps the full history so far to the next adversary action; the
            current round index is ``len(history)``.
        adaptiveness: The k for which the strategy is k-adaptive
            (``math.inf`` when unbounded).
        name: Identifier for reports.
    """

    act: Callable[[History], int]
    adaptiveness: float
    name: str = ""


def oblivious_from_sequence(
    sequence: Sequence[int], name: str = "script"
) -> AdversaryStrategy:
    """Wraps a fixed action script, repeated cyclically, as a 0-adaptive strategy."""
    script = tuple(int(a) for a in sequence)
    if not script:
        raise ValueError("an oblivious script needs at least one action")

    def act(history: History) -> int:
        return script[len(history) % len(script)]

    return AdversaryStrategy(act=act, adaptiveness=0, name=name)


def k_adaptive(
    window_fn: Callable[[tuple[int, ...], int], int],
    k: float,
    name: str = "",
) -> AdversaryStrategy:
    """Builds a k-adaptive strategy from a window rule.

    Args:
        window_fn: Maps (window, round) to an action, where the window holds
            the ``t mod (k + 1)`` most recent outcomes, oldest first.
        k: Adaptiveness bound; ``math.inf`` passes the whole history.
    """
    if k != FULLY_ADAPTIVE and (k < 0 or int(k) != k):
        raise ValueError(f"adaptiveness must be a non-negative int or inf, got {k}")

    def act(history: History) -> int:
        t = len(history)
        i = t if k == FULLY_ADAPTIVE else t % (int(k) + 1)
        return window_fn(history.window(i), t)

    return AdversaryStrategy(act=act, adaptiveness=k, name=name)


# =============================================================================
# Recorded play and hypothetical adversaries
# =============================================================================


@dataclass(frozen=True)
class RecordedPlay:
    """One realized play-through of an adversary.

    Attributes:
        history: The realized outcome history.
        strategy: The real adversary that produced the recorded actions.
    """

    history: History
    strategy: AdversaryStrategy


def hypothetical_k_adaptive(
    recorded: RecordedPlay, k: float, name: str | None = None
) -> AdversaryStrategy:
    """Counterfactual k-adaptive view of a recorded adversary.

    Against a queried history H', round t answers what the real adversary
    would play after the *recorded* first ``t - i`` outcomes followed by the
    last ``i = t mod (k + 1)`` outcomes of H'.  Evaluated on the recorded
    history itself this reproduces the recorded actions for every k, and for
    ``k = inf`` it is the real strategy.

    Raises:
        ValueError: When a finite-k query needs a recorded prefix longer than
            the recorded history.
    """
    if k != FULLY_ADAPTIVE and (k < 0 or int(k) != k):
        raise ValueError(f"adaptiveness must be a non-negative int or inf, got {k}")
    label = name if name is not None else f"hyp{k}({recorded.strategy.name})"
    if recorded.strategy.adaptiveness == 0:
        # An oblivious strategy reads only the round index, so splicing in
        # recorded outcomes cannot change its answer.
        return AdversaryStrategy(
            act=recorded.strategy.act, adaptiveness=k, name=label
        )
    # Snapshot: the recorded history may wrap a live buffer.
    recorded_outcomes = recorded.history.as_tuple()

    def act(history: History) -> int:
        t = len(history)
        if k == FULLY_ADAPTIVE:
            return recorded.strategy.act(history)
        i = t % (int(k) + 1)
        if t - i > len(recorded_outcomes):
            raise ValueError(
                f"hypothetical query at round {t} needs {t - i} recorded "
                f"outcomes but only {len(recorded_outcomes)} were recorded"
            )
        spliced = recorded_outcomes[: t - i] + history.window(i)
        return recorded.strategy.act(History(spliced))

    return AdversaryStrategy(act=act, adaptiveness=k, name=label)


# =============================================================================
# Speeding-audit visitors
# =============================================================================

_HI_OUTCOME = 0


def tourist_a1(k: int = 7) -> AdversaryStrategy:
    """Visitor who drives safely on arrival and risks speeding only if the
    defender never inspected heavily during the stay.

    DS on the first day of each stay; afterwards DS if the defender played HI
    at any point during the stay, otherwise S.  (S pays the visitor best under
    light inspection but worst under heavy inspection; DS is the safe 0.8.)
    """

    def rule(window: tuple[int, ...], t: int) -> int:
        if not window:
            return 1
        return 1 if _HI_OUTCOME in window else 0

    return k_adaptive(rule, k, name="a1")


def tourist_a2(k: int = 7) -> AdversaryStrategy:
    """Like tourist_a1 but speeds on the first day of each stay."""

    def rule(window: tuple[int, ...], t: int) -> int:
        if not window:
            return 0
        return 1 if _HI_OUTCOME in window else 0

    return k_adaptive(rule, k, name="a2")


def alternating_tourists(k: int = 7) -> AdversaryStrategy:
    """Stream of stays alternating between the a1 and a2 first-day rules."""

    def rule(window: tuple[int, ...], t: int) -> int:
        if not window:
            stay = t // (k + 1)
            return 1 if stay % 2 == 0 else 0
        return 1 if _HI_OUTCOME in window else 0

    return k_adaptive(rule, k, name="alternating")


# =============================================================================
# De Bruijn sequences
# =============================================================================


def de_bruijn(m: int) -> tuple[int, ...]:
    """Canonical binary de Bruijn sequence of order ``m``.

    Concatenating the binary Lyndon words whose length divides ``m`` in
    lexicographic order yields the lexicographically smallest sequence in
    which every binary m-window occurs exactly once cyclically.
    """
    if not 1 <= m <= 24:
        raise ValueError(f"order must be in [1, 24], got {m}")
    a = [0] * (m + 1)
    seq: list[int] = []

    def extend(t: int, p: int) -> None:
        if t > m:
            if m % p == 0:
                seq.extend(a[1 : p + 1])
            return
        a[t] = a[t - p]
        extend(t + 1, p)
        for j in range(a[t - p] + 1, 2):
            a[t] = j
            extend(t + 1, t)

    extend(1, 1)
    return tuple(seq)


def is_de_bruijn(sequence: Sequence[int], m: int) -> bool:
    """Checks cyclic m-window coverage, so any rotation of a valid sequence passes."""
    seq = tuple(sequence)
    n = 2**m
    if len(seq) != n or any(s not in (0, 1) for s in seq):
        return False
    seen = set()
    for i in range(n):
        window = tuple(seq[(i + j) % n] for j in range(m))
        if window in seen:
            return False
        seen.add(window)
    return len(seen) == n
