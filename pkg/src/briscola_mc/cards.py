"""Card, suit and seat primitives for the 40-card Italian deck.

Rank valuation: Asso (1) is worth 11 points, Tre (3) 10, Re (10) 4,
Cavallo (9) 3, Fante (8) 2, and the remaining ranks nothing.  In-suit
strength from weakest to strongest runs 2, 4, 5, 6, 7, 8, 9, 10, 3, 1.

Internally every card is also an integer id ``suit * 10 + (rank - 1)``;
the lookup tables at the bottom are indexed by that id and back the hot
simulation loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import List


class Suit(IntEnum):
    """The four suits, in the fixed tie-breaking order used everywhere."""

    DENARI = 0
    SPADE = 1
    BASTONI = 2
    COPPE = 3

    @property
    def display_name(self) -> str:
        return SUIT_NAMES[self.value]


class Seat(str, Enum):
    G1 = "G1"
    G2 = "G2"

    @property
    def other(self) -> "Seat":
        return Seat.G2 if self is Seat.G1 else Seat.G1


SUIT_NAMES = ("Denari", "Spade", "Bastoni", "Coppe")

POINTS_BY_RANK = {1: 11, 2: 0, 3: 10, 4: 0, 5: 0, 6: 0, 7: 0, 8: 2, 9: 3, 10: 4}

# 1 = weakest, 10 = strongest
STRENGTH_BY_RANK = {2: 1, 4: 2, 5: 3, 6: 4, 7: 5, 8: 6, 9: 7, 10: 8, 3: 9, 1: 10}

RANK_DISPLAY = {
    1: "Asso", 2: "2", 3: "Tre", 4: "4", 5: "5",
    6: "6", 7: "7", 8: "Fante", 9: "Cavallo", 10: "Re",
}


@dataclass(frozen=True, slots=True)
class Card:
    suit: Suit
    rank: int

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= 10:
            raise ValueError(f"rank must be in 1..10, got {self.rank}")

    @property
    def points(self) -> int:
        return POINTS_BY_RANK[self.rank]

    @property
    def strength(self) -> int:
        return STRENGTH_BY_RANK[self.rank]

    @property
    def display_name(self) -> str:
        return f"{RANK_DISPLAY[self.rank]} di {SUIT_NAMES[self.suit]}"

    def __str__(self) -> str:
        return self.display_name


def full_deck() -> List[Card]:
    """The 40 distinct cards in canonical order (suit-major, ranks 1..10)."""
    return [Card(suit, rank) for suit in Suit for rank in range(1, 11)]


def card_id(card: Card) -> int:
    return card.suit * 10 + card.rank - 1


def card_from_id(cid: int) -> Card:
    return Card(Suit(cid // 10), cid % 10 + 1)


# --- integer-id lookup tables (index = card id 0..39) ---

SUIT_OF = tuple(cid // 10 for cid in range(40))
RANK_OF = tuple(cid % 10 + 1 for cid in range(40))
POINTS_OF = tuple(POINTS_BY_RANK[r] for r in RANK_OF)
STRENGTH_OF = tuple(STRENGTH_BY_RANK[r] for r in RANK_OF)

# Lexicographic (points, strength, suit) packed into one integer: the
# "cheapest, then weakest, then first-suit" total order on cards.
PREC_OF = tuple(
    (POINTS_OF[c] * 16 + STRENGTH_OF[c]) * 4 + SUIT_OF[c] for c in range(40)
)

CARD_NAME_OF = tuple(
    f"{RANK_DISPLAY[RANK_OF[c]]} di {SUIT_NAMES[SUIT_OF[c]]}" for c in range(40)
)
