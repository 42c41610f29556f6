"""Counter-keyed random streams.

Every replicate draws from ``stream(master_seed, purpose, index)``. The
stream depends only on its key, never on scheduling, so results do not
change with the number of worker threads.
"""
from __future__ import annotations

import numpy as np

# purpose tags, kept distinct so different experiments never share a stream
REPLICATE = 0
HALF_TIME = 1
POISSON = 2
ALDOUS_OUTER = 3
ALDOUS_INNER = 4
ESTIMATE = 5
APP = 6


def stream(master_seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in key)])
    return np.random.Generator(np.random.PCG64(ss))
