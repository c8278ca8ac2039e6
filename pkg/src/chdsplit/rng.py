"""Portable pseudo-random generation.

All randomness in the package flows through SplitMix64 (Steele, Lea and
Flood 2014) so that a given seed produces the same split on every platform
and in every implementation that follows the same recipe:

    state <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (mod 2**64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB      (mod 2**64)
    output z ^ (z >> 31)

Bounded integers use rejection sampling on the raw 64-bit output, shuffles
are Durstenfeld's Fisher-Yates running from the last index down, and
per-iteration substreams are seeded with :func:`substream_seed`.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB

GENERATOR_NAME = "splitmix64"
GENERATOR_CONSTANTS = {
    "increment": f"{GOLDEN:#018x}",
    "mul1": f"{MUL1:#018x}",
    "mul2": f"{MUL2:#018x}",
    "shifts": "30,27,31",
    "bounded": "rejection: draw x until x < 2**64 - (2**64 mod n), return x mod n",
    "shuffle": "fisher-yates, i from len-1 down to 1, j = bounded(i + 1)",
    "substream": "mix64((mix64(seed) + (i + 1) * increment) mod 2**64)",
}


def mix64(z: int) -> int:
    """SplitMix64 output finalizer applied to a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def substream_seed(seed: int, stream: int) -> int:
    """Seed of the independent substream ``stream`` derived from ``seed``."""
    return mix64((mix64(seed) + (stream + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """Minimal SplitMix64 generator with the sampling helpers the package needs."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def random(self) -> float:
        """Uniform double in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: MutableSequence[T]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """``k`` distinct elements drawn without replacement (partial Fisher-Yates)."""
        pool = list(items)
        if not 0 <= k <= len(pool):
            raise ValueError(f"cannot draw {k} of {len(pool)} items")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def uniform_block(seed: int, count: int) -> np.ndarray:
    """``count`` doubles in ``[0, 1)``, equal to ``count`` calls of
    ``SplitMix64(seed).random()`` but vectorized."""
    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + steps * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
