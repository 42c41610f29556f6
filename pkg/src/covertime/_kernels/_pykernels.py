"""Pure numpy / Python implementations of the kernel contracts.

Each function here must return exactly what its counterpart in
``_ckernels.pyx`` returns for the same inputs; ``tests/test_kernels.py``
checks this element by element.
"""
from __future__ import annotations

import numpy as np

_BIG = np.iinfo(np.int64).max


def absorb(first_hit, degrees, members, offsets, full, t0, remaining):
    """Absorb a batch of coupons into the covering state.

    Coupon ``j`` of the batch is drawn at time ``t0 + j + 1``. An element
    is uncovered while ``first_hit[v] == 0``; any other value (including
    the ``-1`` sentinel for non-target elements) counts as covered.
    Returns ``(remaining, stop)`` where ``stop`` is the batch index of the
    coupon that covered the last target, or ``-1``.
    """
    n = first_hit.shape[0]
    nb = offsets.shape[0] - 1
    sizes = np.diff(offsets)
    rows = np.repeat(np.arange(nb, dtype=np.int64), sizes)
    full_idx = np.flatnonzero(full)
    if full_idx.size:
        # a full coupon covers everything; any listed members are ignored
        keep = full[rows] == 0
        members, rows = members[keep], rows[keep]
    times = t0 + 1 + rows
    cand = np.full(n, _BIG, dtype=np.int64)
    np.minimum.at(cand, members, times)
    if full_idx.size:
        np.minimum(cand, t0 + 1 + full_idx[0], out=cand)

    open_ = first_hit == 0
    newly = open_ & (cand < _BIG)
    gained = int(np.count_nonzero(newly))
    if gained < remaining:
        first_hit[newly] = cand[newly]
        if degrees.shape[0]:
            _add_degrees(degrees, members, full_idx.size, n)
        return remaining - gained, -1

    t_stop = int(cand[open_].max())
    stop = t_stop - t0 - 1
    first_hit[newly] = cand[newly]
    if degrees.shape[0]:
        _add_degrees(degrees, members[rows <= stop], int(np.count_nonzero(full_idx <= stop)), n)
    return 0, stop


def _add_degrees(degrees, members, n_full, n):
    counts = np.bincount(members, minlength=n)
    if n_full:
        counts += n_full
    degrees += counts.astype(np.uint32)


def floyd_sample(n, k, u):
    """Uniform k-subsets of range(n), one per row of ``u`` (Floyd's method)."""
    nb = u.shape[0]
    out = np.empty((nb, k), dtype=np.int64)
    if k > 64:
        for b in range(nb):
            seen = set()
            for idx in range(k):
                j = n - k + idx
                t = min(int(u[b, idx] * (j + 1)), j)
                if t in seen:
                    t = j
                seen.add(t)
                out[b, idx] = t
        return out
    for idx in range(k):
        j = n - k + idx
        t = np.minimum((u[:, idx] * (j + 1)).astype(np.int64), j)
        if idx:
            dup = (out[:, :idx] == t[:, None]).any(axis=1)
            t = np.where(dup, j, t)
        out[:, idx] = t
    return out


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def union_stream(parent, size, touched, us, vs, t0, state):
    """Union-find over an edge stream.

    ``state`` holds (components, untouched vertices, t_connect,
    t_no_isolated) and is updated in place. Returns the batch index of the
    edge that connected the graph, or ``-1``.
    """
    par = parent.tolist()
    sz = size.tolist()
    tch = touched.tolist()
    comps, untouched, t_conn, t_iso = (int(x) for x in state)
    stop = -1
    for j, (a, b) in enumerate(zip(us.tolist(), vs.tolist())):
        t = t0 + j + 1
        if not tch[a]:
            tch[a] = 1
            untouched -= 1
        if not tch[b]:
            tch[b] = 1
            untouched -= 1
        if untouched == 0 and t_iso == 0:
            t_iso = t
        ra = _find(par, a)
        rb = _find(par, b)
        if ra != rb:
            if sz[ra] < sz[rb]:
                ra, rb = rb, ra
            par[rb] = ra
            sz[ra] += sz[rb]
            comps -= 1
            if comps == 1:
                t_conn = t
                stop = j
                break
    parent[:] = par
    size[:] = sz
    touched[:] = tch
    state[:] = (comps, untouched, t_conn, t_iso)
    return stop


def disc_cover(inner_hit, outer_hit, centers, m, s, r, torus, t0, state):
    """Mark tiles wholly inside (inner) or touching (outer) each disc.

    ``state`` holds (inner remaining, outer remaining, t_inner, t_outer).
    Returns the batch index of the disc that completed the inner cover, or
    ``-1``.
    """
    nb = centers.shape[0]
    if nb == 0:
        return -1
    r2 = r * r
    cx = centers[:, 0]
    cy = centers[:, 1]
    ilo = np.floor((cx - r) / s).astype(np.int64)
    ihi = np.floor((cx + r) / s).astype(np.int64)
    klo = np.floor((cy - r) / s).astype(np.int64)
    khi = np.floor((cy + r) / s).astype(np.int64)
    w = int(max((ihi - ilo).max(), (khi - klo).max())) + 1
    off = np.arange(w, dtype=np.int64)
    ii = ilo[:, None] + off[None, :]
    kk = klo[:, None] + off[None, :]
    okx = ii <= ihi[:, None]
    oky = kk <= khi[:, None]
    if not torus:
        okx &= (ii >= 0) & (ii < m)
        oky &= (kk >= 0) & (kk < m)

    x0 = ii * s
    x1 = x0 + s
    nx = np.maximum(np.maximum(x0 - cx[:, None], cx[:, None] - x1), 0.0)
    fx = np.maximum(cx[:, None] - x0, x1 - cx[:, None])
    y0 = kk * s
    y1 = y0 + s
    ny = np.maximum(np.maximum(y0 - cy[:, None], cy[:, None] - y1), 0.0)
    fy = np.maximum(cy[:, None] - y0, y1 - cy[:, None])

    ok = okx[:, :, None] & oky[:, None, :]
    near = (nx * nx)[:, :, None] + (ny * ny)[:, None, :] <= r2
    far = (fx * fx)[:, :, None] + (fy * fy)[:, None, :] <= r2
    idx = (ii % m)[:, :, None] * m + (kk % m)[:, None, :]
    times = np.broadcast_to((t0 + 1 + np.arange(nb, dtype=np.int64))[:, None, None], idx.shape)

    n_tiles = inner_hit.shape[0]
    cand_out = np.full(n_tiles, _BIG, dtype=np.int64)
    sel = ok & near
    np.minimum.at(cand_out, idx[sel], times[sel])
    cand_in = np.full(n_tiles, _BIG, dtype=np.int64)
    sel = ok & far
    np.minimum.at(cand_in, idx[sel], times[sel])

    open_in = inner_hit == 0
    new_in = open_in & (cand_in < _BIG)
    t_stop = None
    if int(np.count_nonzero(new_in)) == int(state[0]):
        t_stop = int(cand_in[open_in].max())

    open_out = outer_hit == 0
    new_out = open_out & (cand_out < _BIG)
    if t_stop is not None:
        new_out &= cand_out <= t_stop
        new_in &= cand_in <= t_stop
    gained_out = int(np.count_nonzero(new_out))
    if gained_out and gained_out == int(state[1]):
        state[3] = int(cand_out[open_out].max())
    outer_hit[new_out] = cand_out[new_out]
    state[1] -= gained_out

    inner_hit[new_in] = cand_in[new_in]
    state[0] -= int(np.count_nonzero(new_in))
    if t_stop is None:
        return -1
    state[2] = t_stop
    return t_stop - t0 - 1


def wilson(indptr, indices, edge_ids, root, u):
    """Wilson's loop-erased walk; returns (edge id per vertex, draws used).

    Vertex ``v != root`` reaches the tree through edge ``eid[v]``. When the
    uniform buffer runs out, returns ``(None, -1)``; the caller extends the
    buffer (keeping its prefix) and retries.
    """
    n = indptr.shape[0] - 1
    ip = indptr.tolist()
    ind = indices.tolist()
    eids = edge_ids.tolist()
    uu = u.tolist()
    npos = len(uu)
    nxt = [-1] * n
    eid = [-1] * n
    in_tree = [False] * n
    in_tree[root] = True
    pos = 0
    for i in range(n):
        v = i
        while not in_tree[v]:
            if pos >= npos:
                return None, -1
            lo, hi = ip[v], ip[v + 1]
            c = min(lo + int(uu[pos] * (hi - lo)), hi - 1)
            pos += 1
            nxt[v] = ind[c]
            eid[v] = eids[c]
            v = nxt[v]
        v = i
        while not in_tree[v]:
            in_tree[v] = True
            v = nxt[v]
    return np.asarray(eid, dtype=np.int64), pos
