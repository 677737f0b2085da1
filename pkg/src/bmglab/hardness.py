"""MAX3SAT embedded as a bounded-memory game.

The construction turns a 3-CNF formula over variables x_1..x_V into a game
whose rounds cycle through ``n_slots`` slots, one variable per slot (slot 0
is a reserved marker slot).  The adversary walks a binary De Bruijn sequence
so that the window of its last m published bits identifies the current slot;
on top of the bit it publishes a tag saying how the slot's variable occurs
in a privately drawn clause.  The defender earns a point for naming a
literal that satisfies the clause, but doing so flips a persistent opacity
bit and any further evaluation while opaque is penalized.  A defender
holding a satisfying assignment collects exactly one point per phase;
conversely, per-phase payoff can be converted back into a well-satisfying
assignment by querying the defender along transparency-forced histories.

Defender actions: 0 = claim false, 1 = claim true, 2 = abstain.
Adversary actions encode (next bit, tag) as bit*4 + tag.
Outcomes encode (bit, opacity) as bit*2 + opacity.
States encode (bit window, opacity) as window*2 + opacity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .adversaries import AdversaryStrategy, de_bruijn
from .experts import DEFAULT_STRATEGY_CAP, FixedStrategy, enumeration_cap
from .games import (
    BOUNDED_MEMORY,
    Game,
    GameConfigError,
    History,
    encode_window,
    evolve,
    transition,
)
from .seeding import substream

ABSTAIN = 2

TAG_NEGATIVE = 0
TAG_POSITIVE = 1
TAG_ABSENT = 2
TAG_RESET = 3

_MAX_WINDOW_BITS = 16


# =============================================================================
# CNF formulas
# =============================================================================


@dataclass(frozen=True)
class Cnf3:
    """A CNF formula with clauses of at most three literals.

    Attributes:
        n_vars: Number of declared variables; literals are +-v for v in
            1..n_vars.
        clauses: Clauses as tuples of nonzero literals.
    """

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n_vars < 1:
            raise ValueError(f"need at least one variable, got {self.n_vars}")
        for idx, clause in enumerate(self.clauses):
            if not 1 <= len(clause) <= 3:
                raise ValueError(
                    f"clause {idx} has {len(clause)} literals, expected 1..3"
                )
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"clause {idx} has bad literal {lit}")
            vs = [abs(lit) for lit in clause]
            if any(-lit in clause for lit in clause):
                raise ValueError(f"clause {idx} is a tautology")
            if len(set(vs)) != len(vs):
                raise ValueError(f"clause {idx} repeats a variable")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {self.n_clauses}"]
        lines += [" ".join(str(lit) for lit in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def _all_ints(tokens: Sequence[str]) -> bool:
    return all(tok.lstrip("-").isdigit() for tok in tokens)


def parse_dimacs(text: str) -> Cnf3:
    """Parses DIMACS CNF text; comment and '%' trailer lines are skipped."""
    n_vars = None
    tokens: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or not _all_ints(parts[2:]):
                raise ValueError(f"bad problem line: {line!r}")
            n_vars = int(parts[2])
            continue
        if not _all_ints(line.split()):
            raise ValueError(f"clause line is not integers: {line!r}")
        tokens.extend(int(tok) for tok in line.split())
    if n_vars is None:
        raise ValueError("missing 'p cnf' problem line")
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            if current:
                clauses.append(tuple(current))
                current = []
        else:
            current.append(tok)
    if current:
        clauses.append(tuple(current))
    return Cnf3(n_vars=n_vars, clauses=tuple(clauses))


def _clause_satisfied(clause: Sequence[int], assignment: Sequence[int]) -> bool:
    return any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in clause)


def count_satisfied(cnf: Cnf3, assignment: Sequence[int]) -> int:
    """Number of clauses satisfied by a 0/1 assignment to x_1..x_n."""
    if len(assignment) < cnf.n_vars:
        raise ValueError(
            f"assignment covers {len(assignment)} variables, need {cnf.n_vars}"
        )
    return sum(1 for c in cnf.clauses if _clause_satisfied(c, assignment))


def satisfied_fraction(cnf: Cnf3, assignment: Sequence[int]) -> float:
    """Fraction of clauses satisfied; an empty formula counts as fully met."""
    if cnf.n_clauses == 0:
        return 1.0
    return count_satisfied(cnf, assignment) / cnf.n_clauses


def random_cnf3(
    n_vars: int,
    n_clauses: int,
    *,
    seed: int = 0,
    planted: Sequence[int] | None = None,
) -> Cnf3:
    """Draws clauses uniformly over three distinct variables with random signs.

    Args:
        planted: Optional 0/1 assignment; clauses falsified by it are
            rejection-resampled, so the result is satisfiable by construction.
    """
    if n_vars < 3:
        raise ValueError(f"need at least 3 variables for 3-literal clauses")
    if planted is not None:
        if len(planted) != n_vars or any(v not in (0, 1) for v in planted):
            raise ValueError("planted assignment must be 0/1 of length n_vars")
    rng = substream(seed, "cnf")
    clauses = []
    for _ in range(n_clauses):
        while True:
            vs = rng.choice(n_vars, size=3, replace=False) + 1
            signs = rng.integers(0, 2, size=3)
            clause = tuple(int(v) if s else -int(v) for v, s in zip(vs, signs))
            if planted is None or _clause_satisfied(clause, planted):
                break
        clauses.append(clause)
    return Cnf3(n_vars=n_vars, clauses=tuple(clauses))


# =============================================================================
# Game construction
# =============================================================================


def adversary_action(bit: int, tag: int) -> int:
    return bit * 4 + tag


def adversary_parts(action: int) -> tuple[int, int]:
    return action // 4, action % 4


def outcome_code(bit: int, opaque: int) -> int:
    return bit * 2 + opaque


def outcome_parts(code: int) -> tuple[int, int]:
    return code // 2, code % 2


def state_parts(state: int) -> tuple[int, int]:
    """(bit-window code, opacity bit) of a state."""
    return state >> 1, state & 1


def _raw_reward(opaque: int, d: int, tag: int) -> int:
    if opaque and d != ABSTAIN and tag != TAG_RESET:
        return -1
    if not opaque and d != ABSTAIN and d == tag:
        return 1
    return 0


def _next_opacity(d: int, tag: int) -> int:
    return 1 if (d == ABSTAIN or d == tag) else 0


def clause_tag(clause: Sequence[int], slot: int) -> int:
    """How variable x_slot occurs in the clause; slot 0 is the reset marker."""
    if slot == 0:
        return TAG_RESET
    if slot in clause:
        return TAG_POSITIVE
    if -slot in clause:
        return TAG_NEGATIVE
    return TAG_ABSENT


@dataclass(frozen=True)
class HardnessGame:
    """A formula game plus the slot bookkeeping needed to drive it.

    Attributes:
        game: The bounded-memory game (imperfect information).
        cnf: The embedded formula.
        m: Bit-window length; the slot count is 2**m.
        n_slots: Rounds per phase; slot i hosts variable x_i (slot 0 reserved).
        sequence: The De Bruijn bit sequence the adversary walks, s_0..s_{n-1}.
        slot_of_window: Window code -> slot index (a bijection).
        window_of_slot: Slot index -> window code.
    """

    game: Game
    cnf: Cnf3
    m: int
    n_slots: int
    sequence: tuple[int, ...]
    slot_of_window: tuple[int, ...]
    window_of_slot: tuple[int, ...]

    def clause_for_phase(self, seed: int, phase: int) -> tuple[int, tuple[int, ...]]:
        """(index, clause) drawn for one phase; reproducible from the seed."""
        rng = substream(seed, "clause", phase)
        idx = int(rng.integers(self.cnf.n_clauses))
        return idx, self.cnf.clauses[idx]


def build_hardness_game(cnf: Cnf3) -> HardnessGame:
    """Embeds a formula into a slot-cycling evaluation game.

    The slot count is the smallest power of two covering the variables plus
    the reserved marker slot 0; variables land on slots 1..n_slots-1.  A
    variable that would need the top slot cannot be represented.
    """
    if cnf.n_clauses == 0:
        raise GameConfigError("cannot build a game from an empty formula")
    n_slots = max(2, 1 << (cnf.n_vars - 1).bit_length())
    m = n_slots.bit_length() - 1
    if m > _MAX_WINDOW_BITS:
        raise GameConfigError(
            f"{cnf.n_vars} variables need a {m}-bit window; the cap is "
            f"{_MAX_WINDOW_BITS}"
        )
    used = {abs(lit) for clause in cnf.clauses for lit in clause}
    if n_slots in used:
        raise GameConfigError(
            f"variable x_{n_slots} would need slot {n_slots}, but slots end at "
            f"{n_slots - 1} and slot 0 is reserved; redeclare with "
            f"{n_slots + 1} variables or drop x_{n_slots}"
        )

    seq = de_bruijn(m)
    n_states = 2 ** (m + 1)
    raw = np.zeros((n_states, 3, 8))
    for state in range(n_states):
        opq = state & 1
        for d in range(3):
            for a in range(8):
                raw[state, d, a] = _raw_reward(opq, d, a % 4)
    outcome_probs = np.zeros((3, 8, 4))
    for d in range(3):
        for a in range(8):
            bit, tag = adversary_parts(a)
            outcome_probs[d, a, outcome_code(bit, _next_opacity(d, tag))] = 1.0
    transitions = np.zeros((n_states, 4), dtype=np.int64)
    for state in range(n_states):
        w = state >> 1
        for code in range(4):
            bit, opq = outcome_parts(code)
            transitions[state, code] = ((((w << 1) | bit) & (n_slots - 1)) << 1) | opq

    # Slot i is identified by the window of bits s_{i-m}..s_{i-1} (cyclic).
    window_of_slot = []
    slot_of_window = [0] * n_slots
    for i in range(n_slots):
        window = tuple(seq[(i - m + j) % n_slots] for j in range(m))
        code = encode_window(window, 2)
        window_of_slot.append(code)
        slot_of_window[code] = i

    game = Game(
        name=f"max3sat-v{cnf.n_vars}-c{cnf.n_clauses}",
        kind=BOUNDED_MEMORY,
        memory=m,
        n_outcomes=4,
        n_defender_actions=3,
        n_adversary_actions=8,
        n_states=n_states,
        payoff=(raw + 1.0) / 2.0,
        outcome_probs=outcome_probs,
        state_transitions=transitions,
        initial_state=window_of_slot[0] << 1,
        perfect_information=False,
        reward_range=(-1.0, 1.0),
        raw_payoff=raw,
        defender_action_labels=("false", "true", "abstain"),
        adversary_action_labels=tuple(
            f"bit{b}-{name}"
            for b in (0, 1)
            for name in ("neg", "pos", "absent", "reset")
        ),
        outcome_labels=tuple(
            f"bit{b}-{'opaque' if o else 'clear'}" for b in (0, 1) for o in (0, 1)
        ),
    )
    return HardnessGame(
        game=game,
        cnf=cnf,
        m=m,
        n_slots=n_slots,
        sequence=seq,
        slot_of_window=tuple(slot_of_window),
        window_of_slot=tuple(window_of_slot),
    )


def fixed_from_assignment(hg: HardnessGame, assignment: Sequence[int]) -> FixedStrategy:
    """The honest defender for a 0/1 assignment.

    Claims each slot's variable value while the game is transparent, abstains
    while opaque, and always claims false on the marker slot (abstaining
    there would fail to reset opacity for the next phase).
    """
    if len(assignment) != hg.cnf.n_vars:
        raise ValueError(
            f"assignment covers {len(assignment)} variables, need {hg.cnf.n_vars}"
        )
    if any(v not in (0, 1) for v in assignment):
        raise ValueError("assignment entries must be 0 or 1")
    values = [0] * hg.n_slots
    for v in range(1, hg.n_slots):
        values[v] = int(assignment[v - 1]) if v <= len(assignment) else 0
    actions = []
    for state in range(hg.game.n_states):
        w, opq = state_parts(state)
        slot = hg.slot_of_window[w]
        if slot == 0:
            actions.append(0)
        elif opq:
            actions.append(ABSTAIN)
        else:
            actions.append(values[slot])
    return FixedStrategy(actions=tuple(actions))


def max3sat_adversary(hg: HardnessGame, seed: int = 0) -> AdversaryStrategy:
    """The formula-auditing adversary.

    Oblivious: at round t it is at slot i = t mod n_slots of phase t // n_slots,
    publishes De Bruijn bit s_i, and tags the slot with how x_i occurs in the
    phase's clause (the marker slot always carries the reset tag).
    """
    cache: dict[int, tuple[int, ...]] = {}

    def act(history: History) -> int:
        t = len(history)
        i = t % hg.n_slots
        phase = t // hg.n_slots
        clause = cache.get(phase)
        if clause is None:
            _, clause = hg.clause_for_phase(seed, phase)
            cache[phase] = clause
        return adversary_action(hg.sequence[i], clause_tag(clause, i))

    return AdversaryStrategy(act=act, adaptiveness=0, name=f"max3sat-seed{seed}")


# =============================================================================
# Phase analysis
# =============================================================================


def phase_payoff(
    hg: HardnessGame,
    script: Sequence[int],
    clause: Sequence[int],
    start_opaque: int = 0,
) -> tuple[int, int]:
    """Raw payoff of one phase under a defender action script.

    Returns (total raw payoff, opacity at phase end).
    """
    if len(script) != hg.n_slots:
        raise ValueError(f"script must cover {hg.n_slots} rounds")
    opq = start_opaque
    total = 0
    for i, d in enumerate(script):
        tag = clause_tag(clause, i)
        total += _raw_reward(opq, d, tag)
        opq = _next_opacity(d, tag)
    return total, opq


def max_phase_payoff(
    hg: HardnessGame, clause: Sequence[int], start_opaque: int = 0
) -> int:
    """Exhaustive best raw phase payoff over all defender action scripts."""
    count = 3**hg.n_slots
    cap = enumeration_cap(DEFAULT_STRATEGY_CAP)
    if count > cap:
        raise ValueError(
            f"enumerating {count} phase scripts exceeds the cap of {cap}; "
            f"raise BMG_LAB_CAP to allow it"
        )
    best = -hg.n_slots
    for script in itertools.product(range(3), repeat=hg.n_slots):
        total, _ = phase_payoff(hg, script, clause, start_opaque)
        if total > best:
            best = total
    return best


# =============================================================================
# Assignment recovery
# =============================================================================


def history_defender(
    hg: HardnessGame, strategy: FixedStrategy
) -> Callable[[tuple[int, ...]], int]:
    """Wraps a fixed strategy as an outcome-history oracle."""
    game = hg.game

    def handle(outcomes: tuple[int, ...]) -> int:
        return strategy.action(evolve(game, game.initial_state, outcomes))

    return handle


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of the payoff-to-assignment conversion.

    Attributes:
        assignment: Best recovered 0/1 assignment to x_1..x_n.
        best_fraction: Its exactly evaluated satisfied-clause fraction.
        best_phase: Phase whose snapshot produced it.
        rows: Per phase: (phase, clause index, raw phase payoff, snapshot
            fraction, best fraction so far).
        mean_phase_payoff: Average raw payoff per complete phase.
        n_phases: Number of complete phases observed.
    """

    assignment: tuple[int, ...]
    best_fraction: float
    best_phase: int
    rows: tuple[tuple[int, int, int, float, float], ...]
    mean_phase_payoff: float
    n_phases: int


def assignment_recovery(
    hg: HardnessGame,
    defender,
    horizon: int,
    seed: int = 0,
) -> RecoveryResult:
    """Converts observed play into an assignment, one candidate per phase.

    Runs the real game against the formula adversary while also querying the
    defender on a transparency-forced replica of the current phase: the
    replica keeps every completed phase's real outcomes but rewrites the
    current phase's outcomes as if the opacity bit never rose.  The answer
    the defender gives at slot i on that replica is taken as its claim for
    x_i (abstentions count as false).  Each phase's claims form a candidate
    assignment whose satisfied fraction is evaluated exactly; the best
    snapshot wins.

    Args:
        defender: A fixed strategy, or a callable mapping an outcome-history
            tuple to a defender action.
        horizon: Number of rounds to run; must cover at least one phase.
        seed: Clause-draw seed, shared with ``max3sat_adversary``.
    """
    n = hg.n_slots
    if horizon < n:
        raise ValueError(
            f"horizon {horizon} gives no complete phase (need at least {n} rounds)"
        )
    game = hg.game
    fast = isinstance(defender, FixedStrategy)
    handle = None if fast else defender
    if not fast and not callable(handle):
        raise TypeError("defender must be a FixedStrategy or a history callable")

    state = game.initial_state
    forced_state = state
    real_outcomes: list[int] = []
    phase_start = 0

    claims = [0] * n
    phase_raw = 0
    rows: list[tuple[int, int, int, float, float]] = []
    payoff_sum = 0
    best_fraction = -1.0
    best_phase = -1
    best_assignment: tuple[int, ...] = (0,) * hg.cnf.n_vars

    clause_idx, clause = hg.clause_for_phase(seed, 0)
    for t in range(horizon):
        i = t % n
        phase = t // n
        if i == 0 and t > 0:
            clause_idx, clause = hg.clause_for_phase(seed, phase)
        tag = clause_tag(clause, i)
        bit = hg.sequence[i]

        if fast:
            d_real = defender.action(state)
            d_forced = defender.action(forced_state) if i >= 1 else d_real
        else:
            d_real = handle(tuple(real_outcomes))
            if i >= 1:
                forced = real_outcomes[:phase_start] + [
                    outcome_code(hg.sequence[j], 0) for j in range(i)
                ]
                d_forced = handle(tuple(forced))
            else:
                d_forced = d_real
        if not 0 <= d_real < 3 or not 0 <= d_forced < 3:
            raise ValueError("defender action out of range")
        if i >= 1:
            claims[i] = d_forced if d_forced in (0, 1) else 0

        phase_raw += _raw_reward(state & 1, d_real, tag)
        o = outcome_code(bit, _next_opacity(d_real, tag))
        real_outcomes.append(o)
        state = transition(game, state, o)
        forced_state = transition(game, forced_state, outcome_code(bit, 0))

        if i == n - 1:
            candidate = tuple(
                claims[v] if v < n else 0 for v in range(1, hg.cnf.n_vars + 1)
            )
            fraction = satisfied_fraction(hg.cnf, candidate)
            if fraction > best_fraction:
                best_fraction = fraction
                best_phase = phase
                best_assignment = candidate
            payoff_sum += phase_raw
            rows.append((phase, clause_idx, phase_raw, fraction, best_fraction))
            phase_raw = 0
            phase_start = t + 1
            forced_state = state

    n_phases = len(rows)
    return RecoveryResult(
        assignment=best_assignment,
        best_fraction=best_fraction,
        best_phase=best_phase,
        rows=tuple(rows),
        mean_phase_payoff=payoff_sum / n_phases,
        n_phases=n_phases,
    )
