"""Deterministic random streams.

All randomness in the package flows through Philox, a counter-based
generator with a 64-bit key, so any run is reproducible from an explicit
integer seed.  Substreams keyed by (seed, index) are statistically
independent, which lets callers simulate in parallel and still match a
sequential run bit for bit.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for substream ``index`` of the given 64-bit seed."""
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, int(index) & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
