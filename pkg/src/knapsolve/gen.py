"""Deterministic instance generation for tests and benchmarks.

Instances are reproducible across platforms: the generator is a self
contained splitmix64 stream, so a (seed, shape, distribution) triple pins
the instance bytes forever, independent of Python's hash or RNG evolution.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

DISTRIBUTIONS = ("uniform", "clustered", "hard-equal-weights")


class SplitMix64:
    """splitmix64: additive gamma 0x9E3779B97F4A7C15, two xor-multiply mixes."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish draw in [lo, hi] by modulo; bias is < 2^-40 for the
        ranges used here and determinism matters more than the last bit."""
        if lo > hi:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)


def generate_instance(
    n: int,
    w_max: int,
    p_max: int,
    t_frac: float,
    seed: int,
    dist: str = "uniform",
):
    """Return (items, capacity) for the given shape.

    uniform             independent weights and profits.
    clustered           weights gather around ~sqrt(w_max) centers, stressing
                        the residue-class structure of the batch updates.
    hard-equal-weights  many items on few distinct weights just below w_max,
                        profits strongly correlated to weight, producing deep
                        rank classes and near-ties around the greedy break.
    """
    if n < 1 or w_max < 1 or p_max < 1:
        raise ValueError("n, w_max and p_max must be >= 1")
    if not 0.0 <= t_frac <= 1.0:
        raise ValueError("t_frac must be in [0, 1]")
    if dist not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {dist!r}")
    rng = SplitMix64(seed)
    items = []
    if dist == "uniform":
        for _ in range(n):
            items.append((rng.randint(1, w_max), rng.randint(1, p_max)))
    elif dist == "clustered":
        k = max(1, math.isqrt(w_max))
        centers = [rng.randint(1, w_max) for _ in range(k)]
        spread = max(1, w_max // 64)
        for _ in range(n):
            c = centers[rng.randint(0, k - 1)]
            w = min(w_max, max(1, c + rng.randint(-spread, spread)))
            items.append((w, rng.randint(1, p_max)))
    else:  # hard-equal-weights
        lo = max(1, w_max - max(1, w_max // 16))
        jitter = max(1, p_max // 100)
        for _ in range(n):
            w = rng.randint(lo, w_max)
            p = max(1, w * p_max // w_max)
            items.append((w, max(1, min(p_max, p + rng.randint(0, jitter) - jitter // 2))))
    total_w = sum(w for w, _ in items)
    capacity = int(t_frac * total_w)
    return items, capacity
