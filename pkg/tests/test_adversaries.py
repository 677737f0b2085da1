"""Adaptiveness windows, counterfactual replay, visitor rules, sequences."""

import math

import pytest

from bmglab.adversaries import (
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
from bmglab.games import History
from bmglab.seeding import substream


def test_oblivious_script_cycles():
    adv = oblivious_from_sequence([3, 1, 4])
    assert adv.adaptiveness == 0
    got = [adv.act(History(tuple(range(t)))) for t in range(7)]
    assert got == [3, 1, 4, 3, 1, 4, 3]


def test_oblivious_script_must_be_nonempty():
    with pytest.raises(ValueError, match="at least one action"):
        oblivious_from_sequence([])


def test_window_resets_every_k_plus_one_rounds():
    """The rule sees exactly t mod (k+1) outcomes, the most recent ones."""
    seen = []

    def rule(window, t):
        seen.append((t, window))
        return 0

    adv = k_adaptive(rule, k=2)
    outcomes = (5, 6, 7, 8, 9, 10, 11)
    for t in range(7):
        adv.act(History(outcomes[:t]))
    assert [len(w) for _, w in seen] == [0, 1, 2, 0, 1, 2, 0]
    assert seen[1] == (1, (5,))
    assert seen[2] == (2, (5, 6))
    assert seen[4] == (4, (8,))
    assert seen[5] == (5, (8, 9))


def test_fully_adaptive_window_is_whole_history():
    seen = []
    adv = k_adaptive(lambda w, t: seen.append(w) or 0, k=FULLY_ADAPTIVE)
    adv.act(History((1, 2, 3)))
    assert seen == [(1, 2, 3)]
    assert adv.adaptiveness == math.inf


@pytest.mark.parametrize("k", [-1, 0.5, -math.inf])
def test_adaptiveness_must_be_whole(k):
    with pytest.raises(ValueError, match="adaptiveness"):
        k_adaptive(lambda w, t: 0, k)
    with pytest.raises(ValueError, match="adaptiveness"):
        recorded = RecordedPlay(History((0, 1)), tourist_a1(1))
        hypothetical_k_adaptive(recorded, k)


def test_hypothetical_reproduces_recorded_actions():
    """On the recorded history itself the splice is the identity, any k."""
    rng = substream(11, "replay")
    for trial in range(20):
        outcomes = tuple(int(rng.integers(2)) for _ in range(12))
        real = tourist_a1(3)
        recorded = RecordedPlay(History(outcomes), real)
        truth = [real.act(History(outcomes[:t])) for t in range(12)]
        for k in (0, 1, 2, 5, FULLY_ADAPTIVE):
            hyp = hypothetical_k_adaptive(recorded, k)
            assert hyp.adaptiveness == k
            got = [hyp.act(History(outcomes[:t])) for t in range(12)]
            assert got == truth


def test_hypothetical_splices_recorded_prefix():
    # 1-adaptive view of a 3-adaptive visitor: at t=3 (i = 1) the first two
    # outcomes come from the recording, only the last from the query
    recorded = RecordedPlay(History((1, 1, 1, 1)), tourist_a1(3))
    hyp = hypothetical_k_adaptive(recorded, 1)
    # query history ends in HI, so the spliced window (just that HI) -> DS
    assert hyp.act(History((0, 0, 0))) == 1
    # t=2 has i=0: the answer depends on the recorded prefix alone, and the
    # visitor saw two LI days there, so it speeds regardless of the query
    assert hyp.act(History((0, 0))) == 0


def test_hypothetical_fully_adaptive_is_real_strategy():
    recorded = RecordedPlay(History((1, 0, 1)), tourist_a2(2))
    hyp = hypothetical_k_adaptive(recorded, FULLY_ADAPTIVE)
    real = tourist_a2(2)
    for hist in [(), (0,), (1, 1), (0, 1, 0, 1, 1)]:
        assert hyp.act(History(hist)) == real.act(History(hist))


def test_hypothetical_needs_enough_recording():
    recorded = RecordedPlay(History((1, 1)), tourist_a1(3))
    hyp = hypothetical_k_adaptive(recorded, 1)
    with pytest.raises(ValueError, match="needs 4 recorded outcomes but only 2"):
        hyp.act(History((0, 0, 0, 0)))


def test_hypothetical_oblivious_recording_never_runs_out():
    # an oblivious strategy ignores outcomes, so no splice is needed and
    # queries past the recorded horizon stay legal
    script = oblivious_from_sequence([0, 1, 1])
    recorded = RecordedPlay(History((1,)), script)
    hyp = hypothetical_k_adaptive(recorded, 2)
    assert hyp.adaptiveness == 2
    assert hyp.act is script.act
    assert [hyp.act(History((0,) * t)) for t in range(8)] == [0, 1, 1, 0, 1, 1, 0, 1]


def test_visitor_first_day_rules():
    a1, a2 = tourist_a1(7), tourist_a2(7)
    assert a1.act(History(())) == 1  # arrives cautious
    assert a2.act(History(())) == 0  # arrives speeding
    # one HI sighting during the stay scares both into DS
    assert a1.act(History((1, 1, 0))) == 1
    assert a2.act(History((1, 1, 0))) == 1
    # an all-LI stay invites speeding
    assert a1.act(History((1, 1, 1))) == 0
    assert a2.act(History((1, 1, 1))) == 0


def test_alternating_visitors_switch_each_stay():
    adv = alternating_tourists(1)
    # stays last k+1 = 2 rounds; first days are t = 0, 2, 4, ...
    first_days = [adv.act(History((1,) * t)) for t in (0, 2, 4, 6)]
    assert first_days == [1, 0, 1, 0]
    assert adv.act(History((1, 1, 1))) == 0  # second day, no HI seen


def test_de_bruijn_canonical_order_three():
    assert de_bruijn(3) == (0, 0, 0, 1, 0, 1, 1, 1)
    assert de_bruijn(1) == (0, 1)
    assert de_bruijn(2) == (0, 0, 1, 1)


@pytest.mark.parametrize("m", range(1, 9))
def test_de_bruijn_covers_all_windows(m):
    seq = de_bruijn(m)
    assert len(seq) == 2**m
    assert is_de_bruijn(seq, m)


def test_rotations_stay_de_bruijn():
    seq = de_bruijn(4)
    for shift in range(len(seq)):
        rotated = seq[shift:] + seq[:shift]
        assert is_de_bruijn(rotated, 4)


def test_is_de_bruijn_rejects_corruption():
    seq = list(de_bruijn(3))
    seq[2] ^= 1
    assert not is_de_bruijn(seq, 3)
    assert not is_de_bruijn(de_bruijn(3)[:-1], 3)
    assert not is_de_bruijn((0, 2, 1, 1, 0, 0, 1, 0), 3)


def test_de_bruijn_order_bounds():
    with pytest.raises(ValueError, match="order"):
        de_bruijn(0)
    with pytest.raises(ValueError, match="order"):
        de_bruijn(25)
