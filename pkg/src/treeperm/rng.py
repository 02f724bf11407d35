"""Seedable random streams for reproducible experiments.

A stream is keyed by (seed, stream id); the pair seeds a PCG64 bit generator
through numpy's SeedSequence, so equal keys replay the same draw sequence and
distinct stream ids give statistically independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass
class RngStream:
    """A keyed, reproducible random stream (PCG64)."""

    seed: int
    stream: int = 0
    gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = np.random.SeedSequence([self.seed & _MASK64, self.stream & _MASK64])
        self.gen = np.random.Generator(np.random.PCG64(key))

    def substream(self, stream: int) -> "RngStream":
        """Fresh stream with the same seed and a different stream id."""
        return RngStream(self.seed, stream)

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low: int, high: int | None = None, size=None):
        return self.gen.integers(low, high, size=size)

    def geometric0(self, p: float, size=None):
        """Geometric draw(s) on {0, 1, 2, ...} with P(k) = p (1-p)^k."""
        return self.gen.geometric(p, size) - 1

    def size_biased_geometric_half(self, size=None):
        """Draw(s) from P(k) = k 2^(-k-1) on {1, 2, ...}.

        Realized as one plus the sum of two independent Geometric(1/2) draws.
        """
        return self.gen.geometric(0.5, size) + self.gen.geometric(0.5, size) - 1
