"""Time the compiled kernels against the numpy fallback on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from covertime import graphs
from covertime._kernels import backends


def _absorb_case(rng):
    n, k, nb = 10_000, 25, 4000
    members = np.concatenate([rng.choice(n, k, replace=False) for _ in range(nb)]).astype(np.int64)
    offsets = np.arange(nb + 1, dtype=np.int64) * k
    full = np.zeros(nb, dtype=np.uint8)

    def run(mod):
        fh = np.zeros(n, dtype=np.int64)
        deg = np.zeros(n, dtype=np.uint32)
        return mod.absorb(fh, deg, members, offsets, full, 0, n)
    return run


def _floyd_case(rng):
    u = rng.random((20_000, 25))
    return lambda mod: mod.floyd_sample(10_000, 25, u)


def _union_case(rng):
    n, nb = 1000, 8000
    us = rng.integers(0, n, nb).astype(np.int64)
    vs = ((us + 1 + rng.integers(0, n - 1, nb)) % n).astype(np.int64)

    def run(mod):
        parent = np.arange(n, dtype=np.int64)
        size = np.ones(n, dtype=np.int64)
        touched = np.zeros(n, dtype=np.uint8)
        state = np.array([n, n, 0, 0], dtype=np.int64)
        return mod.union_stream(parent, size, touched, us, vs, 0, state)
    return run


def _disc_case(rng):
    side, r = 100.0, 3.0
    m = int(np.ceil(side / (0.1 * r)))
    s = side / m
    centers = np.ascontiguousarray(rng.random((3000, 2)) * side)

    def run(mod):
        inner = np.zeros(m * m, dtype=np.int64)
        outer = np.zeros(m * m, dtype=np.int64)
        state = np.array([m * m, m * m, 0, 0], dtype=np.int64)
        return mod.disc_cover(inner, outer, centers, m, s, r, True, 0, state)
    return run


def _wilson_case(rng):
    g = graphs.random_regular(500, 6, seed=1)
    indptr, indices, eids = g.csr()
    u = rng.random(200_000)
    return lambda mod: mod.wilson(indptr, indices, eids, 0, u)


CASES = {"absorb": _absorb_case, "floyd_sample": _floyd_case, "union_stream": _union_case,
         "disc_cover": _disc_case, "wilson": _wilson_case}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    mods = backends()
    print(f"[bench] backends: {', '.join(mods)}")
    print(f"{'kernel':<14}" + "".join(f"{name:>12}" for name in mods) + f"{'speedup':>10}")
    for name, make in CASES.items():
        run = make(np.random.default_rng(args.seed))
        best = {}
        for bname, mod in mods.items():
            ts = []
            for _ in range(args.repeat):
                t = time.perf_counter()
                run(mod)
                ts.append(time.perf_counter() - t)
            best[bname] = min(ts)
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{name:<14}" + "".join(f"{best[b] * 1e3:>10.2f}ms" for b in mods) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
