"""The one random source used everywhere: MT19937 via random.Random.

Only ``getrandbits`` is used, with rejection sampling for bounded integers,
so streams are identical across platforms and Python versions.
"""

from __future__ import annotations

import random


class Rng:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self._r = random.Random(self.seed)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        k = (n - 1).bit_length()
        while True:
            v = self._r.getrandbits(k) if k else 0
            if v < n:
                return v

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
