"""Portable deterministic PRNG: xoshiro256++ with splitmix64 seeding.

Every random decision in the tournament flows through this module, so the
exact bit-level procedure is written out here and must never change:

* ``splitmix64``: state advances by adding 0x9E3779B97F4A7C15; the output is
  the state passed through the murmur-style finalizer
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31`` (all arithmetic mod 2**64).
* ``Xoshiro256PP``: the xoshiro256++ generator of Blackman & Vigna.  The
  four 64-bit state words are the first four splitmix64 outputs for the
  given seed.  One step produces ``rotl(s0 + s3, 23) + s0`` and updates the
  state with the fixed shift/rotation network below.
* ``uniform_below(n)``: unbiased rejection sampling; draw 64-bit values,
  reject any ``>= n * (2**64 // n)``, return the survivor mod ``n``.

Given the same seed, any implementation of these three procedures produces
bit-identical streams.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


def splitmix64_mix(z: int) -> int:
    """The splitmix64 output finalizer (a 64-bit avalanche function)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed: int, count: int) -> List[int]:
    """First ``count`` outputs of splitmix64 seeded with ``seed``."""
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + _GOLDEN) & _MASK64
        out.append(splitmix64_mix(state))
    return out


def derive_stream_seed(master_seed: int, match_id: int, game_index: int) -> int:
    """Per-game substream seed for (master seed, matchup, game index).

    Sequential avalanche mixing keeps the derivation asymmetric, so no two
    (match_id, game_index) pairs share a stream:

        z = mix(master_seed + GOLDEN * match_id)
        z = mix(z + GOLDEN * game_index)
    """
    z = splitmix64_mix((master_seed + _GOLDEN * match_id) & _MASK64)
    return splitmix64_mix((z + _GOLDEN * game_index) & _MASK64)


class Xoshiro256PP:
    """xoshiro256++ with a 256-bit state seeded via splitmix64."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int) -> None:
        self.s0, self.s1, self.s2, self.s3 = splitmix64_stream(seed, 4)
        if self.s0 == self.s1 == self.s2 == self.s3 == 0:
            self.s0 = 1  # the all-zero state is the one forbidden fixpoint

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s0 + s3) & _MASK64
        result = (((x << 23) | (x >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self.s0, self.s1, self.s2 = s0, s1, s2
        self.s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        return result

    def uniform_below(self, n: int) -> int:
        """Unbiased draw from {0, ..., n-1} by rejection sampling."""
        if n <= 0:
            raise ValueError(f"uniform_below requires n >= 1, got {n}")
        threshold = (2**64 // n) * n
        u = self.next_u64()
        while u >= threshold:
            u = self.next_u64()
        return u % n


def fisher_yates_shuffle(items: Sequence[T], rng: Xoshiro256PP) -> List[T]:
    """Uniform random permutation of ``items`` (in-place Fisher-Yates).

    For n from len-1 down to 1, draws k uniform on {0, ..., n} and swaps
    positions n and k.  The input sequence itself is not modified.
    """
    out = list(items)
    for n in range(len(out) - 1, 0, -1):
        k = rng.uniform_below(n + 1)
        out[n], out[k] = out[k], out[n]
    return out
