"""Deterministic zobrist key tables, shared by the reference board and the fast kernel.

Tables are derived from a fixed seed with splitmix64 so hashes are identical
across processes and runs; match workers and logged transcripts rely on that.
"""

import numpy as np

_SEED = 0x9E3779B97F4A7C15
_cache = {}


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x, z ^ (z >> 31)


def tables(size):
    """(stone_keys, turn_keys): stone_keys[color-1][pt] for colors 1/2, turn_keys[color-1]."""
    if size not in _cache:
        state = _SEED ^ (size * 0x1F123BB5)
        keys = np.empty((2, size * size), dtype=np.uint64)
        for color in range(2):
            for pt in range(size * size):
                state, value = _splitmix64(state)
                keys[color, pt] = value
        turn = np.empty(2, dtype=np.uint64)
        for color in range(2):
            state, value = _splitmix64(state)
            turn[color] = value
        keys.setflags(write=False)
        turn.setflags(write=False)
        _cache[size] = (keys, turn)
    return _cache[size]
