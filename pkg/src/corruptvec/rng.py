"""Deterministic random-number protocol used everywhere in this package.

All stochastic pieces (parameter init, subsampling, corruption, window
sizing, negative draws) consume uniforms from the same 64-bit LCG:

    state <- state * 6364136223846793005 + 1442695040888963407   (mod 2**64)
    uniform = (state >> 11) * 2**-53                              in [0, 1)
    randint(n) = floor(uniform * n)

The compiled kernels in ``_kernels`` implement the identical recurrence on
``uint64``, which is what makes single-worker runs bit-reproducible and lets
the plain-Python trainer in ``reference`` replay them exactly.  Independent
streams are derived from (seed, stream id) with a splitmix64-style mixer.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
LCG_MULT = 6364136223846793005
LCG_ADD = 1442695040888963407
GOLDEN = 0x9E3779B97F4A7C15

# stream ids reserved by the trainer
INIT_STREAM = 0
WORKER_STREAM_BASE = 1


def mix64(x: int) -> int:
    """splitmix64 finalizer; decorrelates nearby integers."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def stream_state(seed: int, stream: int) -> int:
    """Initial LCG state for stream ``stream`` of ``seed``."""
    return mix64((seed + GOLDEN * (stream + 1)) & MASK64)


def hash_tokens(tokens) -> int:
    """FNV-1a over a token-id sequence; content-addressed stream seeds."""
    h = 0xCBF29CE484222325
    for t in tokens:
        h ^= int(t) & 0xFFFFFFFF
        h = (h * 0x100000001B3) & MASK64
    return h


class Rng:
    """Pure-Python view of the shared LCG stream.

    Bit-compatible with the compiled kernels: interleaving draws between this
    class and a kernel holding the same state yields one continuous stream.
    The state lives in a uint64[1] array so kernels can advance it in place.
    """

    __slots__ = ("_cell",)

    def __init__(self, seed: int, stream: int = 0):
        self._cell = np.array([stream_state(seed, stream)], dtype=np.uint64)

    @classmethod
    def from_state(cls, state: int) -> "Rng":
        rng = cls.__new__(cls)
        rng._cell = np.array([state & MASK64], dtype=np.uint64)
        return rng

    @property
    def state(self) -> int:
        return int(self._cell[0])

    def next_u64(self) -> int:
        s = (self.state * LCG_MULT + LCG_ADD) & MASK64
        self._cell[0] = s
        return s

    def uniform(self) -> float:
        """One double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)

    def uniforms(self, n: int) -> np.ndarray:
        """Array of ``n`` consecutive uniforms (compiled fill)."""
        from . import _kernels

        out = np.empty(n, dtype=np.float64)
        _kernels.fill_uniforms(self._cell, out)
        return out

    def state_cell(self) -> np.ndarray:
        """The live uint64[1] state slot, for handing to kernels."""
        return self._cell
