"""Rules core: trick resolution, dealing, and the 20-trick game loop.

Two ways to run a game are exposed.  ``deal`` + ``play_trick`` step a
``GameState`` one trick at a time and are convenient for inspection and
testing.  ``play_game`` runs the whole game on integer card ids and is the
path the tournament uses; both paths share the same decision cores and
trick-resolution rule, and tests pin their transcripts against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Set, Tuple

from .cards import (
    CARD_NAME_OF,
    Card,
    POINTS_OF,
    SUIT_NAMES,
    SUIT_OF,
    STRENGTH_OF,
    Seat,
    Suit,
    card_from_id,
    card_id,
)
from .policies import FOLLOW_CORE, LEAD_CORE, Observation, PolicyId, choose


class PolicyContractError(RuntimeError):
    """A policy returned a card that is not in its hand."""


class TrickOutcome(NamedTuple):
    winner: Seat
    trick_points: int


class GameSummary(NamedTuple):
    """One game's final line: outcome, points, and trump bookkeeping."""

    partita_id: int
    match_id: int
    strategy_g1: str
    strategy_g2: str
    trump_suit: str
    outcome: str  # "G1" | "G2" | "Tie"
    final_points_g1: int
    final_points_g2: int
    briscole_total_g1: int
    briscole_total_g2: int
    delta_briscola: int


class TrickRecord(NamedTuple):
    """One trick-log row (the 15-column CSV schema, in order)."""

    partita_id: int
    match_id: int
    strategy_g1: str
    strategy_g2: str
    mano: int
    seme_briscola: str
    carta_g1: str
    carta_g2: str
    vincitore_mano: str
    punti_mano: int
    briscole_totali_g1: int
    briscole_totali_g2: int
    vincitore_partita: str
    punti_finali_g1: int
    punti_finali_g2: int


@dataclass
class GameState:
    """Full table state between tricks.

    ``stock`` is ordered top-first and still contains the exposed trump
    card as its last element until it is drawn.  ``memory`` is the public
    information set: the exposed card plus all cards played in completed
    tricks.  ``briscole_total_*`` count every trump card that has ever
    entered a hand (dealt or drawn) and never decrease.
    """

    hand_g1: List[Card]
    hand_g2: List[Card]
    stock: List[Card]
    exposed: Card
    trump: Suit
    points_g1: int = 0
    points_g2: int = 0
    briscole_total_g1: int = 0
    briscole_total_g2: int = 0
    memory: Set[Card] = field(default_factory=set)
    leader: Seat = Seat.G1
    trick_index: int = 1


def leader_wins(leader_id: int, responder_id: int, trump: int) -> bool:
    """Trick rule on integer card ids: leader wins iff (i) same suit and
    stronger rank, or (ii) trump against non-trump, or (iii) both
    non-trump of different suits."""
    sl = SUIT_OF[leader_id]
    sr = SUIT_OF[responder_id]
    return (
        (sl == sr and STRENGTH_OF[leader_id] > STRENGTH_OF[responder_id])
        or (sl == trump and sr != trump)
        or (sl != trump and sr != trump and sl != sr)
    )


def resolve_trick(leader_card: Card, responder_card: Card, trump: Suit) -> bool:
    """True iff the leader's card wins the trick."""
    if leader_card == responder_card:
        raise ValueError(f"identical cards in a trick: {leader_card}")
    return leader_wins(card_id(leader_card), card_id(responder_card), int(trump))


def _validate_permutation_ids(ids: Sequence[int]) -> None:
    if len(ids) != 40 or set(ids) != set(range(40)):
        raise ValueError(
            f"permutation must contain each of the 40 cards exactly once "
            f"(got {len(ids)} entries, {len(set(ids))} distinct)"
        )


def deal(permutation: Sequence[Card]) -> GameState:
    """Deal a shuffled deck: three cards each, one exposed to fix trump.

    Positions 0-2 go to G1, 3-5 to G2, position 6 is exposed and sets the
    trump suit, and positions 7-39 form the stock top-down with the exposed
    card re-inserted at the very bottom (it is drawn last).
    """
    _validate_permutation_ids([card_id(c) for c in permutation])
    exposed = permutation[6]
    trump = exposed.suit
    state = GameState(
        hand_g1=list(permutation[0:3]),
        hand_g2=list(permutation[3:6]),
        stock=list(permutation[7:40]) + [exposed],
        exposed=exposed,
        trump=trump,
    )
    state.briscole_total_g1 = sum(1 for c in state.hand_g1 if c.suit == trump)
    state.briscole_total_g2 = sum(1 for c in state.hand_g2 if c.suit == trump)
    state.memory = {exposed}
    return state


def play_trick(state: GameState, policy_g1: PolicyId, policy_g2: PolicyId) -> TrickOutcome:
    """Play one trick in place: choices, resolution, scoring, draws."""
    if state.leader is Seat.G1:
        lead_hand, follow_hand = state.hand_g1, state.hand_g2
        lead_policy, follow_policy = policy_g1, policy_g2
    else:
        lead_hand, follow_hand = state.hand_g2, state.hand_g1
        lead_policy, follow_policy = policy_g2, policy_g1

    lead_card = choose(
        lead_policy,
        Observation(frozenset(lead_hand), None, state.trump, frozenset(state.memory)),
    )
    if lead_card not in lead_hand:
        raise PolicyContractError(
            f"{lead_policy.value} led {lead_card}, not in hand {lead_hand}"
        )
    follow_card = choose(
        follow_policy,
        Observation(frozenset(follow_hand), lead_card, state.trump, frozenset(state.memory)),
    )
    if follow_card not in follow_hand:
        raise PolicyContractError(
            f"{follow_policy.value} answered {follow_card}, not in hand {follow_hand}"
        )

    winner = state.leader if resolve_trick(lead_card, follow_card, state.trump) else state.leader.other
    points = lead_card.points + follow_card.points
    if winner is Seat.G1:
        state.points_g1 += points
    else:
        state.points_g2 += points

    lead_hand.remove(lead_card)
    follow_hand.remove(follow_card)
    state.memory.add(lead_card)
    state.memory.add(follow_card)

    if state.stock:  # winner draws first, then the loser
        for seat in (winner, winner.other):
            drawn = state.stock.pop(0)
            if seat is Seat.G1:
                state.hand_g1.append(drawn)
                if drawn.suit == state.trump:
                    state.briscole_total_g1 += 1
            else:
                state.hand_g2.append(drawn)
                if drawn.suit == state.trump:
                    state.briscole_total_g2 += 1

    state.leader = winner
    state.trick_index += 1
    return TrickOutcome(winner, points)


def _play_ids(
    p1: int, p2: int, perm: Sequence[int]
) -> Tuple[int, int, int, int, int, List[Tuple[int, int, int, int, int, int, int]]]:
    """Fast 20-trick loop on integer card ids.

    Returns (points_g1, points_g2, briscole_g1, briscole_g2, trump_suit,
    trick tuples); each trick tuple is (mano, card_g1, card_g2, winner_seat,
    trick_points, briscole_g1, briscole_g2) with the post-draw trump counts.
    """
    hand1 = [perm[0], perm[1], perm[2]]
    hand2 = [perm[3], perm[4], perm[5]]
    exposed = perm[6]
    trump = SUIT_OF[exposed]
    stock = list(perm[7:40])
    stock.append(exposed)

    suit_of = SUIT_OF
    points_of = POINTS_OF
    b1 = sum(1 for c in hand1 if suit_of[c] == trump)
    b2 = sum(1 for c in hand2 if suit_of[c] == trump)
    memory = 1 << exposed
    pts1 = pts2 = 0
    leading = 0  # seat index: 0 = G1, 1 = G2
    lead1, lead2 = LEAD_CORE[p1], LEAD_CORE[p2]
    follow1, follow2 = FOLLOW_CORE[p1], FOLLOW_CORE[p2]
    pos = 0
    tricks = []

    for mano in range(1, 21):
        try:
            if leading == 0:
                lc = lead1(hand1, trump, memory)
                rc = follow2(hand2, lc, trump)
                hand1.remove(lc)
                hand2.remove(rc)
                cg1, cg2 = lc, rc
            else:
                lc = lead2(hand2, trump, memory)
                rc = follow1(hand1, lc, trump)
                hand2.remove(lc)
                hand1.remove(rc)
                cg1, cg2 = rc, lc
        except ValueError as exc:
            raise PolicyContractError(
                f"policy chose a card outside its hand at trick {mano}"
            ) from exc

        won = leading if leader_wins(lc, rc, trump) else 1 - leading
        tp = points_of[lc] + points_of[rc]
        if won == 0:
            pts1 += tp
        else:
            pts2 += tp

        if pos < 34:
            first, second = stock[pos], stock[pos + 1]
            pos += 2
            if won == 0:
                hand1.append(first)
                hand2.append(second)
                if suit_of[first] == trump:
                    b1 += 1
                if suit_of[second] == trump:
                    b2 += 1
            else:
                hand2.append(first)
                hand1.append(second)
                if suit_of[first] == trump:
                    b2 += 1
                if suit_of[second] == trump:
                    b1 += 1

        memory |= (1 << lc) | (1 << rc)
        tricks.append((mano, cg1, cg2, won, tp, b1, b2))
        leading = won

    return pts1, pts2, b1, b2, trump, tricks


def _outcome_label(pts1: int, pts2: int) -> str:
    if pts1 > 60:
        return "G1"
    if pts2 > 60:
        return "G2"
    return "Tie"


def play_game(
    policy_g1: PolicyId,
    policy_g2: PolicyId,
    permutation: Sequence[Card],
    *,
    partita_id: int = 0,
    match_id: int = 0,
) -> Tuple[GameSummary, List[TrickRecord]]:
    """Play one complete game on the given deal; pure in all arguments."""
    ids = [card_id(c) for c in permutation]
    _validate_permutation_ids(ids)
    pts1, pts2, b1, b2, trump, tricks = _play_ids(policy_g1.index, policy_g2.index, ids)
    outcome = _outcome_label(pts1, pts2)
    s1, s2 = policy_g1.value, policy_g2.value
    trump_name = SUIT_NAMES[trump]
    summary = GameSummary(
        partita_id, match_id, s1, s2, trump_name, outcome, pts1, pts2, b1, b2, b1 - b2
    )
    records = [
        TrickRecord(
            partita_id,
            match_id,
            s1,
            s2,
            mano,
            trump_name,
            CARD_NAME_OF[cg1],
            CARD_NAME_OF[cg2],
            "G1" if won == 0 else "G2",
            tp,
            tb1,
            tb2,
            outcome,
            pts1,
            pts2,
        )
        for mano, cg1, cg2, won, tp, tb1, tb2 in tricks
    ]
    return summary, records


def state_from_ids(perm_ids: Sequence[int]) -> GameState:
    """Deal from a permutation given as integer card ids."""
    return deal([card_from_id(i) for i in perm_ids])
