"""Reproducible per-run seed streams

``derive_seed(master, index)`` is SplitMix64 applied to
``master + (index + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``; the output is
bit-exact across platforms and Python versions.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    return splitmix64((master + (index + 1) * GOLDEN_GAMMA) & MASK64)


def derive_stream(master: int, index: int, count: int) -> list:
    """``count`` independent sub-seeds for one run (graph, placement, spread, ...)"""
    base = derive_seed(master, index)
    return [derive_seed(base, j) for j in range(count)]
