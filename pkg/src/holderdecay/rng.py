"""SplitMix64: a fixed 64-bit generator so seeds give identical draws everywhere."""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Steele, Lea and Flood's SplitMix64 with 53-bit uniform doubles."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self, size: int | None = None):
        """Uniform doubles in [0, 1)."""
        if size is None:
            return (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return np.array([(self.next_u64() >> 11) * (1.0 / (1 << 53)) for _ in range(int(size))])

    def uniform(self, low: float = 0.0, high: float = 1.0, size: int | None = None):
        u = self.random(size)
        return low + (high - low) * u

    def integers(self, low: int, high: int, size: int | None = None):
        """Integers in ``[low, high)`` (modulo reduction; bias is below 2**-40 for small ranges)."""
        span = int(high) - int(low)
        if span <= 0:
            raise ValueError("high must exceed low")
        if size is None:
            return int(low) + self.next_u64() % span
        return np.array([int(low) + self.next_u64() % span for _ in range(int(size))], dtype=np.int64)
