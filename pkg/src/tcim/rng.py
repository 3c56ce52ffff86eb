"""Counter-based random streams (splitmix64).

Every random decision in the package flows from a single 64-bit seed
through `RngStream(seed, index)`.  Distinct indices give independent
streams, identical (seed, index) pairs reproduce bit-for-bit, and the
generator is cheap enough to reimplement identically in the compiled
kernels, so both backends consume randomness the same way.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, index: int) -> int:
    """Initial splitmix64 state for stream `index` of `seed`."""
    return mix64(((seed & MASK64) * GOLDEN) ^ mix64((index & MASK64) + GOLDEN))


def substream_index(index: int, j: int) -> int:
    """Derive the index of the j-th child stream of stream `index`."""
    return mix64((index & MASK64) + GOLDEN * ((j & MASK64) + 1))


class RngStream:
    """One reproducible stream of uniform random numbers."""

    __slots__ = ("seed", "index", "_state")

    def __init__(self, seed: int, index: int = 0):
        self.seed = seed & MASK64
        self.index = index & MASK64
        self._state = stream_state(self.seed, self.index)

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_double(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return min(int(self.next_double() * n), n - 1)

    def substream(self, j: int) -> "RngStream":
        return RngStream(self.seed, substream_index(self.index, j))

    @property
    def state(self) -> int:
        return self._state

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index})"
