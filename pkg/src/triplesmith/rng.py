"""Counter-based deterministic random source.

Shard digests depend on this construction, so it is part of the data
contract and must never change silently:

* ``mix64`` is the SplitMix64 finalizer (Steele et al. weights).
* A stream key is derived by folding the key parts left to right:
  ``k = mix64(k ^ mix64(part))`` starting from the 64-bit constant
  ``0x243F6A8885A308D3`` (the first 64 fraction bits of pi).
* The i-th 64-bit output word of a stream is
  ``mix64((key + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64)``.

Because each word is a pure function of ``(key, i)``, any sample in any
shard can be regenerated in isolation: workers never share RNG state.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_KEY_INIT = 0x243F6A8885A308D3


def mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    """Fold an ordered tuple of integers (e.g. seed, shard id, record index)
    into a 64-bit stream key."""
    key = _KEY_INIT
    for p in parts:
        key = mix64(key ^ mix64(p & _MASK64))
    return key


class CounterRng:
    """Deterministic stream of values addressed by ``(key parts, counter)``."""

    __slots__ = ("key", "counter")

    def __init__(self, *parts: int):
        self.key = derive_key(*parts)
        self.counter = 0

    def word(self) -> int:
        """Next 64-bit output word."""
        self.counter += 1
        return mix64((self.key + self.counter * _GAMMA) & _MASK64)

    def bits(self, k: int) -> int:
        """Next k-bit unsigned integer (k may exceed 64)."""
        out = 0
        filled = 0
        while filled < k:
            out |= self.word() << filled
            filled += 64
        return out & ((1 << k) - 1)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) for arbitrarily large n, by rejection."""
        if n <= 0:
            raise ValueError(f"below() needs n >= 1: {n}")
        k = (n - 1).bit_length()
        if k == 0:
            return 0
        while True:
            x = self.bits(k)
            if x < n:
                return x

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        if hi <= lo:
            raise ValueError(f"empty range [{lo}, {hi})")
        return lo + self.below(hi - lo)

    def sign(self) -> int:
        """Uniform choice from {-1, +1}."""
        return 1 if self.word() & 1 else -1
