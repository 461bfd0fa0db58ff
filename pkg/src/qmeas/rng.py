"""Reproducible random streams.

Shot number s of a run seeded with ``seed`` always uses the
counter-based stream keyed by (seed, s), so results do not depend on how
shots are batched or parallelized.
"""

from __future__ import annotations

import numpy as np


def seeded_rng(seed: int) -> np.random.Generator:
    """Single stream for one-off sampling."""
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, 0]))


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Independent stream for one shot of a seeded run."""
    key = [seed & 0xFFFFFFFFFFFFFFFF, shot & 0xFFFFFFFFFFFFFFFF]
    return np.random.Generator(np.random.Philox(key=key))


class ShotStreams:
    """Per-shot streams sharing one generator object.

    ``stream(s)`` yields the same numbers as ``shot_rng(seed, s)`` but
    rekeys a single Philox instance instead of constructing a fresh one,
    which matters in tight shot loops. The returned generator is only
    valid until the next ``stream`` call.
    """

    def __init__(self, seed: int):
        self._seed = seed & 0xFFFFFFFFFFFFFFFF
        self._bg = np.random.Philox(key=[self._seed, 0])
        self._gen = np.random.Generator(self._bg)

    def stream(self, shot: int) -> np.random.Generator:
        state = self._bg.state
        state["state"]["key"][:] = [self._seed, shot & 0xFFFFFFFFFFFFFFFF]
        state["state"]["counter"][:] = 0
        state["buffer_pos"] = 4  # discard any buffered block
        state["has_uint32"] = 0
        state["uinteger"] = 0
        self._bg.state = state
        return self._gen
