"""Seeded random source shared by the Python and compiled code paths.

Every random decision is derived from raw 64-bit outputs of numpy's PCG64 by
the rules below.  The compiled kernel reads the *same* bit generator through
its C interface and applies identical rules, so a run produces the same
trajectory whichever backend executes it.

* ``below(k)``: 0 for ``k == 1`` (no draw); otherwise redraw while the raw
  value is below ``2**64 mod k``, then reduce modulo ``k``.
* ``uniform()``: top 53 bits scaled by ``2**-53``.
* ``coin()``: top bit.
* ``bits(n)``: ``ceil(n / 64)`` raw words, word ``j`` filling integer bits
  ``64j .. 64j + 63``, truncated to ``n`` bits.
"""

from __future__ import annotations

import numpy as np

_TWO64 = 1 << 64
_INV53 = 1.0 / 9007199254740992.0


class Rng:
    __slots__ = ("seed", "bit_generator", "_raw")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.bit_generator = np.random.PCG64(self.seed)
        self._raw = self.bit_generator.random_raw

    def next_u64(self) -> int:
        return self._raw()

    def below(self, k: int) -> int:
        if k <= 1:
            if k == 1:
                return 0
            raise ValueError(f"below() needs k >= 1, got {k}")
        threshold = (_TWO64 - k) % k
        raw = self._raw
        while True:
            r = raw()
            if r >= threshold:
                return r % k

    def uniform(self) -> float:
        return (self._raw() >> 11) * _INV53

    def coin(self) -> int:
        return self._raw() >> 63

    def bits(self, n: int) -> int:
        raw = self._raw
        v = 0
        for j in range((n + 63) // 64):
            v |= raw() << (64 * j)
        return v & ((1 << n) - 1)


def trial_seed(base_seed: int, *key: int) -> int:
    """Independent 64-bit seed for the stream identified by ``key``.

    Derived with :class:`numpy.random.SeedSequence` spawn keys, so extending a
    batch with new keys never changes the seeds of existing ones.
    """
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
