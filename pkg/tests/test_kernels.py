"""The compiled kernels and the numpy fallback must agree exactly."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from covertime import graphs
from covertime._kernels import backends

BACKENDS = backends()
needs_c = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
PY = BACKENDS["python"]
C = BACKENDS.get("cython")


def _absorb_inputs(seed, n, nb, full_at=None, targets=False):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(0, min(n, 6) + 1, nb)
    members = np.concatenate([rng.choice(n, s, replace=False) for s in sizes] or [np.zeros(0)]).astype(np.int64)
    offsets = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    full = np.zeros(nb, dtype=np.uint8)
    if full_at is not None and full_at < nb:
        full[full_at] = 1
    fh = np.zeros(n, dtype=np.int64)
    if targets:
        fh[rng.random(n) < 0.5] = -1
    return fh, members, offsets, full


@needs_c
@given(st.integers(0, 10_000), st.integers(1, 40), st.integers(1, 60),
       st.one_of(st.none(), st.integers(0, 59)), st.booleans(), st.booleans())
def test_absorb_backends_agree(seed, n, nb, full_at, targets, degrees):
    fh, members, offsets, full = _absorb_inputs(seed, n, nb, full_at, targets)
    remaining = int(np.count_nonzero(fh == 0))
    if remaining == 0:
        return
    out = []
    for mod in (PY, C):
        f = fh.copy()
        d = np.zeros(n if degrees else 0, dtype=np.uint32)
        r = mod.absorb(f, d, members, offsets, full, 7, remaining)
        out.append((r, f, d))
    assert out[0][0] == out[1][0]
    np.testing.assert_array_equal(out[0][1], out[1][1])
    np.testing.assert_array_equal(out[0][2], out[1][2])


@needs_c
@given(st.integers(0, 10_000), st.integers(1, 200), st.data())
def test_floyd_backends_agree(seed, n, data):
    k = data.draw(st.integers(1, n))
    u = np.random.default_rng(seed).random((20, k))
    a, b = PY.floyd_sample(n, k, u), C.floyd_sample(n, k, u)
    np.testing.assert_array_equal(a, b)
    for row in a:
        assert len(set(row.tolist())) == k and row.min() >= 0 and row.max() < n


def test_floyd_is_uniform_over_pairs():
    rng = np.random.default_rng(3)
    s = PY.floyd_sample(6, 2, rng.random((60_000, 2)))
    s.sort(axis=1)
    codes = s[:, 0] * 6 + s[:, 1]
    freq = np.bincount(codes, minlength=36)[codes.min():].astype(float)
    freq = freq[freq > 0] / s.shape[0]
    assert freq.size == 15
    assert np.all(np.abs(freq - 1 / 15) < 0.005)


@needs_c
@given(st.integers(0, 10_000), st.integers(2, 60), st.integers(1, 400))
def test_union_stream_backends_agree(seed, n, nb):
    rng = np.random.default_rng(seed)
    us = rng.integers(0, n, nb).astype(np.int64)
    vs = ((us + 1 + rng.integers(0, n - 1, nb)) % n).astype(np.int64)
    res = []
    for mod in (PY, C):
        parent = np.arange(n, dtype=np.int64)
        size = np.ones(n, dtype=np.int64)
        touched = np.zeros(n, dtype=np.uint8)
        state = np.array([n, n, 0, 0], dtype=np.int64)
        stop = mod.union_stream(parent, size, touched, us, vs, 3, state)
        res.append((stop, state.tolist(), touched.tolist(), size.tolist()))
    assert res[0] == res[1]


@needs_c
@given(st.integers(0, 10_000), st.booleans(), st.integers(1, 80))
def test_disc_cover_backends_agree(seed, torus, nb):
    rng = np.random.default_rng(seed)
    side, r = 12.0, 1.5
    m = int(np.ceil(side / (0.1 * r)))
    s = side / m
    centers = np.ascontiguousarray(rng.random((nb, 2)) * side)
    res = []
    for mod in (PY, C):
        inner = np.zeros(m * m, dtype=np.int64)
        outer = np.zeros(m * m, dtype=np.int64)
        state = np.array([m * m, m * m, 0, 0], dtype=np.int64)
        stop = mod.disc_cover(inner, outer, centers, m, s, r, torus, 0, state)
        res.append((stop, state.tolist(), inner.tolist(), outer.tolist()))
    assert res[0] == res[1]


@needs_c
@given(st.integers(0, 10_000), st.integers(3, 30))
def test_wilson_backends_agree(seed, n):
    g = graphs.random_regular(n + (n % 2), 3, seed=seed % 97)
    indptr, ind, eids = g.csr()
    rng = np.random.default_rng(seed)
    for size in (5, 10_000):
        u = rng.random(size)
        a, b = PY.wilson(indptr, ind, eids, 0, u), C.wilson(indptr, ind, eids, 0, u)
        assert a[1] == b[1]
        if a[0] is None:
            assert b[0] is None
        else:
            np.testing.assert_array_equal(a[0], b[0])
