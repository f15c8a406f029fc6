"""Counter-based pseudorandom generator used by every sampling routine.

The generator is deliberately tiny and fully documented so that compiled
kernels (and reimplementations in other languages) can reproduce the exact
same streams:

    value(seed, i) = mix64((seed + (i + 1) * GOLDEN) mod 2**64)

where ``mix64`` is the SplitMix64 finalizer (Steele, Lea & Flood 2014) and
``GOLDEN = 0x9E3779B97F4A7C15`` is 2**64 / phi rounded to odd.  Because each
output depends only on ``(seed, i)`` the stream is random-access: vectorized
NumPy code and a sequential C loop produce bit-identical values.

Uniform doubles take the top 53 bits: ``(value >> 11) * 2**-53``, giving
values in [0, 1).  Standard normals are produced from consecutive uniform
pairs via Box-Muller, two uniforms per normal:

    z_i = sqrt(-2 * log(1 - u_{2i})) * cos(2 * pi * u_{2i+1})

Streams are split by hashing a tag into a child seed; see ``CounterRng.split``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return (z ^ (z >> 31)) & _MASK


def raw_values(seed: int, start: int, count: int) -> np.ndarray:
    """uint64 outputs at absolute counter positions [start, start + count)."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = (idx + np.uint64(1)) * np.uint64(GOLDEN) + np.uint64(seed & _MASK)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def uniforms_at(seed: int, start: int, count: int) -> np.ndarray:
    """float64 uniforms in [0, 1) at absolute counter positions."""
    return (raw_values(seed, start, count) >> np.uint64(11)).astype(np.float64) * _TO_UNIT


class CounterRng:
    """Sequential view over the counter-based stream for one seed.

    Instances track a position so successive calls consume disjoint ranges of
    the stream; the mapping from positions to values is fixed by the module
    docstring, so any consumer that documents its consumption layout is
    reproducible from the seed alone.
    """

    def __init__(self, seed: int, position: int = 0):
        self.seed = seed & _MASK
        self.position = position

    def uniforms(self, count: int) -> np.ndarray:
        u = uniforms_at(self.seed, self.position, count)
        self.position += count
        return u

    def normals(self, count: int) -> np.ndarray:
        """Standard normals via Box-Muller; consumes 2 * count uniforms."""
        u = self.uniforms(2 * count)
        u1, u2 = u[0::2], u[1::2]
        # 1 - u1 lies in (0, 1], so the log is finite.
        return np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * np.pi * u2)

    def choice(self, cumulative: np.ndarray) -> int:
        """Draw one index from a cumulative-probability array."""
        u = self.uniforms(1)[0]
        j = int(np.searchsorted(cumulative, u, side="right"))
        return min(j, len(cumulative) - 1)

    def split(self, tag: int) -> "CounterRng":
        """Independent child stream identified by an integer tag."""
        return CounterRng(mix64(self.seed ^ mix64(tag & _MASK)))
