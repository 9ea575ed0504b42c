"""Seedable, portable random number generation.

Every stochastic operation in the toolkit draws from PCG32
(pcg_setseq_64_xsh_rr_32, O'Neill 2014): 64-bit LCG state advanced by
``state * 6364136223846793005 + inc`` with an XSH-RR output permutation.
The algorithm is fully specified below so that independent
implementations (e.g. bindings in another language) can reproduce output
streams bit for bit:

* ``next_uint32``  -- one PCG32 output.
* ``next_float``   -- ``next_uint32() / 2**32`` (float64 in [0, 1)).
* ``next_below(n)``-- unbiased bounded draw by rejection: draw 32-bit
  words until ``r >= (2**32 - n) % n``, return ``r % n``.
* ``shuffle``      -- Fisher-Yates, ``j = next_below(i + 1)`` for
  ``i = len-1 .. 1``.

Per-record generators are derived from ``(seed, ordinal)`` with
splitmix64 so that output is independent of worker scheduling:
``z = (seed * 0x9E3779B97F4A7C15 + ordinal) mod 2**64``, then
``initstate = splitmix64(z)`` and ``initseq = splitmix64(z + 1)``.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1
_PCG_MULT = 6364136223846793005
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """One splitmix64 scrambling round of ``z`` (Steele et al. 2014)."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Pcg32:
    """PCG32 generator seeded with (initstate, initseq)."""

    __slots__ = ("state", "inc")

    def __init__(self, initstate: int, initseq: int = 0):
        self.state = 0
        self.inc = ((initseq << 1) | 1) & _MASK64
        self.next_uint32()
        self.state = (self.state + initstate) & _MASK64
        self.next_uint32()

    def next_uint32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & _MASK64
        xorshifted = ((old >> 18) ^ old) >> 27 & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << (32 - rot & 31))) & _MASK32

    def next_float(self) -> float:
        """float64 in [0, 1) with 32 bits of randomness."""
        return self.next_uint32() * 2.0**-32

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("bound must be positive")
        threshold = (_MASK32 + 1 - n) % n
        while True:
            r = self.next_uint32()
            if r >= threshold:
                return r % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_rng(seed: int, ordinal: int = 0) -> Pcg32:
    """Generator for record ``ordinal`` of a stream seeded with ``seed``."""
    z = (seed * _GOLDEN + ordinal) & _MASK64
    return Pcg32(splitmix64(z), splitmix64((z + 1) & _MASK64))
