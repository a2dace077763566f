"""The single seeded generator behind every sampled check.

Definition (pinned): MT19937 as implemented by Python's random.Random,
seeded with the non-negative integer seed.  Only getrandbits(32) is
called; bounded draws use rejection sampling on the smallest covering
power of two, so the stream does not depend on any other library
routine.
"""

from __future__ import annotations

import random


class Rng:
    def __init__(self, seed=0):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed
        self._mt = random.Random(seed)

    def bits(self, k):
        """k uniform bits from whole 32-bit words, most significant first."""
        out, have = 0, 0
        while have < k:
            out = (out << 32) | self._mt.getrandbits(32)
            have += 32
        return out >> (have - k)

    def below(self, n):
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            x = self.bits(k)
            if x < n:
                return x

    def integer(self, lo, hi):
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def vector(self, n, lo=-2, hi=2):
        return [self.integer(lo, hi) for _ in range(n)]
