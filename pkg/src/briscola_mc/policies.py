"""The three deterministic playing policies: greedy, hoarder, counter.

All three share the "cheapest points, then weakest rank, then first suit"
comparator (``prec_key``) and the same follower rule (i): if an in-suit
card can beat the opponent's lead, play the cheapest such card.  They
differ in when they spend a trump and in how they open a trick:

* greedy   - leads its cheapest card, preferring non-trumps; as follower
             it takes every trick it can, trumping with the cheapest
             winning trump whenever rule (i) fails.
* hoarder  - never leads a trump while holding a non-trump; as follower
             it only trumps when the opponent's card is worth at least 10
             points, otherwise it discards its cheapest non-trump.
* counter  - plays like the hoarder but watches the public memory: as
             leader it first tries a "carico trap", leading a non-trump
             Asso or Tre whose same-suit sibling has already been seen.

Decision functions are pure: identical observations yield identical cards.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import AbstractSet, Callable, List, Optional, Tuple

from .cards import (
    Card,
    PREC_OF,
    POINTS_OF,
    RANK_OF,
    STRENGTH_OF,
    SUIT_OF,
    Suit,
    card_from_id,
    card_id,
)


class PolicyId(str, Enum):
    G = "G"  # greedy
    H = "H"  # hoarder
    C = "C"  # counter

    @property
    def index(self) -> int:
        return _POLICY_INDEX[self.value]


_POLICY_INDEX = {"G": 0, "H": 1, "C": 2}

#: Minimum opponent-card value at which hoarder / counter will spend a trump.
TRUMP_THRESHOLD_H = 10
TRUMP_THRESHOLD_C = 10


@dataclass(frozen=True)
class Observation:
    """Everything a policy may look at when choosing a card.

    ``opponent_card`` is None when acting as leader.  ``memory`` is the
    public information set: the exposed trump card plus every card played
    in completed tricks.
    """

    hand: AbstractSet[Card]
    opponent_card: Optional[Card]
    trump: Suit
    memory: AbstractSet[Card]


def prec_key(card: Card) -> Tuple[int, int, int]:
    """Sort key of the shared comparator: (points, strength, suit)."""
    return (card.points, card.strength, int(card.suit))


def prec_compare(a: Card, b: Card) -> int:
    """-1 if a precedes b (cheaper / weaker / earlier suit), else 1; 0 if equal."""
    ka, kb = prec_key(a), prec_key(b)
    if ka < kb:
        return -1
    return 1 if ka > kb else 0


# ---------------------------------------------------------------------------
# Integer-id decision cores.  ``hand`` is a list of card ids, ``trump`` a
# suit index, ``memory`` a 40-bit mask.  These back both the public API and
# the tournament's inner loop.
# ---------------------------------------------------------------------------


def _prec_min(hand: List[int]) -> int:
    best = hand[0]
    bk = PREC_OF[best]
    for c in hand:
        if PREC_OF[c] < bk:
            bk = PREC_OF[c]
            best = c
    return best


def _lead_greedy(hand: List[int], trump: int, memory: int) -> int:
    # lexicographic (is-trump, points, strength, suit); PREC_OF < 4096
    best = hand[0]
    bk = PREC_OF[best] + (4096 if SUIT_OF[best] == trump else 0)
    for c in hand:
        k = PREC_OF[c] + (4096 if SUIT_OF[c] == trump else 0)
        if k < bk:
            bk = k
            best = c
    return best


def _lead_hoarder(hand: List[int], trump: int, memory: int) -> int:
    non_trumps = [c for c in hand if SUIT_OF[c] != trump]
    return _prec_min(non_trumps) if non_trumps else _prec_min(hand)


def _lead_counter(hand: List[int], trump: int, memory: int) -> int:
    # Carico trap: non-trump Asso/Tre whose same-suit sibling carico is
    # already public.  Asso (11 pts) is tried before Tre, suit order breaks
    # ties between equal ranks.
    caricos = sorted(
        (c for c in hand if SUIT_OF[c] != trump and RANK_OF[c] in (1, 3)),
        key=lambda c: (-POINTS_OF[c], SUIT_OF[c]),
    )
    for c in caricos:
        sibling = SUIT_OF[c] * 10 + (2 if RANK_OF[c] == 1 else 0)
        if (memory >> sibling) & 1:
            return c
    return _lead_hoarder(hand, trump, memory)


def _in_suit_winner(hand: List[int], opp: int) -> int:
    """Cheapest card of the opponent's suit with stronger rank, or -1."""
    suit = SUIT_OF[opp]
    beat = STRENGTH_OF[opp]
    best = -1
    bk = 1 << 20
    for c in hand:
        if SUIT_OF[c] == suit and STRENGTH_OF[c] > beat and PREC_OF[c] < bk:
            bk = PREC_OF[c]
            best = c
    return best


def _winning_trump(hand: List[int], opp: int, trump: int) -> int:
    """Cheapest trump that wins the trick, or -1.

    Any trump beats a non-trump lead; a trump lead needs a stronger trump.
    """
    best = -1
    bk = 1 << 20
    if SUIT_OF[opp] == trump:
        beat = STRENGTH_OF[opp]
        for c in hand:
            if SUIT_OF[c] == trump and STRENGTH_OF[c] > beat and PREC_OF[c] < bk:
                bk = PREC_OF[c]
                best = c
    else:
        for c in hand:
            if SUIT_OF[c] == trump and PREC_OF[c] < bk:
                bk = PREC_OF[c]
                best = c
    return best


def _follow_greedy(hand: List[int], opp: int, trump: int) -> int:
    c = _in_suit_winner(hand, opp)
    if c >= 0:
        return c
    c = _winning_trump(hand, opp, trump)
    if c >= 0:
        return c
    return _prec_min(hand)


def _follow_thrifty(hand: List[int], opp: int, trump: int, threshold: int) -> int:
    c = _in_suit_winner(hand, opp)
    if c >= 0:
        return c
    if POINTS_OF[opp] >= threshold:
        c = _winning_trump(hand, opp, trump)
        if c >= 0:
            return c
    non_trumps = [c for c in hand if SUIT_OF[c] != trump]
    return _prec_min(non_trumps) if non_trumps else _prec_min(hand)


def _follow_hoarder(hand: List[int], opp: int, trump: int) -> int:
    return _follow_thrifty(hand, opp, trump, TRUMP_THRESHOLD_H)


def _follow_counter(hand: List[int], opp: int, trump: int) -> int:
    return _follow_thrifty(hand, opp, trump, TRUMP_THRESHOLD_C)


#: Dispatch tables indexed by PolicyId.index (G=0, H=1, C=2).
LEAD_CORE: Tuple[Callable[[List[int], int, int], int], ...] = (
    _lead_greedy,
    _lead_hoarder,
    _lead_counter,
)
FOLLOW_CORE: Tuple[Callable[[List[int], int, int], int], ...] = (
    _follow_greedy,
    _follow_hoarder,
    _follow_counter,
)


# ---------------------------------------------------------------------------
# Public API over Card objects.
# ---------------------------------------------------------------------------


def _choose(policy_index: int, obs: Observation) -> Card:
    if not obs.hand:
        raise ValueError("cannot choose from an empty hand")
    hand = [card_id(c) for c in obs.hand]
    trump = int(obs.trump)
    if obs.opponent_card is None:
        memory = 0
        for c in obs.memory:
            memory |= 1 << card_id(c)
        chosen = LEAD_CORE[policy_index](hand, trump, memory)
    else:
        chosen = FOLLOW_CORE[policy_index](hand, card_id(obs.opponent_card), trump)
    return card_from_id(chosen)


def greedy_choose(obs: Observation) -> Card:
    """Decision function of the greedy policy."""
    return _choose(0, obs)


def hoarder_choose(obs: Observation) -> Card:
    """Decision function of the hoarder policy."""
    return _choose(1, obs)


def counter_choose(obs: Observation) -> Card:
    """Decision function of the counter policy."""
    return _choose(2, obs)


def choose(policy: PolicyId, obs: Observation) -> Card:
    """Dispatch to the named policy's decision function."""
    return _choose(policy.index, obs)
