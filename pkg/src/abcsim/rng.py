"""Seeded random streams.

Every stochastic routine takes a ``numpy.random.Generator``.  Experiments
derive one generator per trial from ``(seed, *stream_ids)`` using Philox4x64,
a counter-based 64-bit generator, so a trial's draws depend only on its ids
and never on how trials are scheduled across workers.
"""
from __future__ import annotations

import numpy as np


def substream(seed: int, *ids: int) -> np.random.Generator:
    """Independent Philox generator for the stream ``ids`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in ids))
    return np.random.Generator(np.random.Philox(ss))


def make_rng(seed: int) -> np.random.Generator:
    return substream(seed)


def pairwise_sum(values) -> float:
    """Fixed-tree pairwise sum; the result depends only on the order of ``values``."""
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
