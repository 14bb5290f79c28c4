"""Random latency and inter-block samplers.

Every sampler owns a private numpy stream spawned from the chain seed, so
adding reads to a workload never shifts the mining schedule.
"""

from __future__ import annotations

import numpy as np

STREAMS = ("interblock", "submit", "read", "propagation")

# Rejection sampling gives up after this many draws and returns the floor.
_MAX_REJECTIONS = 1000


def spawn_streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.Generator(np.random.PCG64(child)) for name, child in zip(STREAMS, children)}


class LatencySampler:
    """Normal round-trip latency truncated below at ``minimum``.

    With probability ``tail_probability`` the draw is multiplied by a factor
    uniform in [1.5, tail_multiplier_max], which produces the sparse long
    upper tail seen in node round-trip measurements.
    """

    def __init__(self, rng: np.random.Generator, mean: float, std: float, minimum: float,
                 tail_probability: float = 0.0, tail_multiplier_max: float = 1.5):
        if mean <= 0 or std <= 0 or minimum <= 0:
            raise ValueError("latency parameters must be strictly positive")
        if minimum >= mean + 3 * std:
            raise ValueError("truncation floor leaves almost no probability mass")
        if not 0.0 <= tail_probability < 1.0:
            raise ValueError("tail_probability must be in [0, 1)")
        if tail_multiplier_max < 1.5:
            raise ValueError("tail_multiplier_max must be at least 1.5")
        self.rng = rng
        self.mean = mean
        self.std = std
        self.minimum = minimum
        self.tail_probability = tail_probability
        self.tail_multiplier_max = tail_multiplier_max

    def sample(self) -> float:
        value = self.minimum
        for _ in range(_MAX_REJECTIONS):
            draw = float(self.rng.normal(self.mean, self.std))
            if draw >= self.minimum:
                value = draw
                break
        if self.tail_probability and float(self.rng.random()) < self.tail_probability:
            value *= float(self.rng.uniform(1.5, self.tail_multiplier_max))
        return value


class InterblockSampler:
    """Exponential inter-block gaps (memoryless proof-of-work arrivals)."""

    def __init__(self, rng: np.random.Generator, mean: float):
        if mean <= 0:
            raise ValueError("mean_interblock must be strictly positive")
        self.rng = rng
        self.mean = mean

    def sample(self) -> float:
        return float(self.rng.exponential(self.mean))
