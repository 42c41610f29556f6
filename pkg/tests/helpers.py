"""Shared builders for tests."""
from __future__ import annotations

import numpy as np

from covertime import model as M


def random_explicit(rng: np.random.Generator, n: int, n_sets: int | None = None) -> M.Explicit:
    """A random explicit model on ``n`` elements whose support covers every element."""
    k = int(rng.integers(1, 7)) if n_sets is None else n_sets
    sets = []
    for _ in range(k):
        mask = rng.random(n) < rng.uniform(0.1, 0.7)
        sets.append(tuple(np.flatnonzero(mask).tolist()))
    # make sure everything is coverable
    for v in range(n):
        if not any(v in s for s in sets):
            sets.append((v,))
    w = rng.uniform(0.2, 1.0, len(sets))
    w = w / w.sum()
    w[-1] = 1.0 - float(np.sum(w[:-1]))
    return M.Explicit(n, list(zip(sets, w.tolist())))
