"""Counter-based seed splitting.

All randomness in a run flows from one 64-bit seed.  A generator for a
particular job is identified by a stream tag plus integer counters
(restart index, grid cell, trial number ...), so every job draws the same
numbers no matter which thread runs it or in what order.
"""

from __future__ import annotations

import numpy as np

from wigner_cs.constants import Stream
from wigner_cs.exceptions import DomainError


def derive_rng(seed: int, stream: Stream | int, *counters: int) -> np.random.Generator:
    """Return the generator for ``(seed, stream, *counters)``."""
    if seed < 0:
        raise DomainError("seed must be non-negative")
    key = (int(stream), *(int(c) for c in counters))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))
