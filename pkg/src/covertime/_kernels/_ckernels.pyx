# cython: language_level=3
"""Compiled inner loops. Contracts mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint32_t u32
ctypedef cnp.uint8_t u8


def absorb(i64[::1] first_hit, u32[::1] degrees, const i64[::1] members,
           const i64[::1] offsets, const u8[::1] full, i64 t0, i64 remaining):
    cdef Py_ssize_t n = first_hit.shape[0]
    cdef Py_ssize_t nb = offsets.shape[0] - 1
    cdef bint count_deg = degrees.shape[0] > 0
    cdef Py_ssize_t j, a, v
    cdef Py_ssize_t stop = -1
    cdef i64 t
    with nogil:
        for j in range(nb):
            t = t0 + j + 1
            if full[j]:
                for v in range(n):
                    if first_hit[v] == 0:
                        first_hit[v] = t
                        remaining -= 1
                    if count_deg:
                        degrees[v] += 1
            else:
                for a in range(offsets[j], offsets[j + 1]):
                    v = members[a]
                    if first_hit[v] == 0:
                        first_hit[v] = t
                        remaining -= 1
                    if count_deg:
                        degrees[v] += 1
            if remaining == 0:
                stop = j
                break
    return remaining, stop


def floyd_sample(i64 n, i64 k, const double[:, ::1] u):
    cdef Py_ssize_t nb = u.shape[0]
    out_arr = np.empty((nb, k), dtype=np.int64)
    stamp_arr = np.zeros(n, dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef i64[::1] stamp = stamp_arr
    cdef Py_ssize_t b, idx
    cdef i64 j, t
    with nogil:
        for b in range(nb):
            for idx in range(k):
                j = n - k + idx
                t = <i64>(u[b, idx] * (j + 1))
                if t > j:
                    t = j
                if stamp[t] == b + 1:
                    t = j
                stamp[t] = b + 1
                out[b, idx] = t
    return out_arr


cdef inline i64 _find(i64[::1] parent, i64 x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def union_stream(i64[::1] parent, i64[::1] size, u8[::1] touched,
                 const i64[::1] us, const i64[::1] vs, i64 t0, i64[::1] state):
    # state: components, untouched vertices, t_connect, t_no_isolated
    cdef Py_ssize_t m = us.shape[0]
    cdef Py_ssize_t j
    cdef Py_ssize_t stop = -1
    cdef i64 a, b, ra, rb, t
    with nogil:
        for j in range(m):
            t = t0 + j + 1
            a = us[j]
            b = vs[j]
            if not touched[a]:
                touched[a] = 1
                state[1] -= 1
            if not touched[b]:
                touched[b] = 1
                state[1] -= 1
            if state[1] == 0 and state[3] == 0:
                state[3] = t
            ra = _find(parent, a)
            rb = _find(parent, b)
            if ra != rb:
                if size[ra] < size[rb]:
                    ra, rb = rb, ra
                parent[rb] = ra
                size[ra] += size[rb]
                state[0] -= 1
                if state[0] == 1:
                    state[2] = t
                    stop = j
                    break
    return stop


def disc_cover(i64[::1] inner_hit, i64[::1] outer_hit, const double[:, ::1] centers,
               i64 m, double s, double r, bint torus, i64 t0, i64[::1] state):
    # state: inner remaining, outer remaining, t_inner, t_outer
    cdef Py_ssize_t nb = centers.shape[0]
    cdef Py_ssize_t j
    cdef Py_ssize_t stop = -1
    cdef i64 i, k, ilo, ihi, klo, khi, ii, kk, idx, t
    cdef double cx, cy, x0, x1, y0, y1, nx, ny, fx, fy, r2 = r * r
    with nogil:
        for j in range(nb):
            t = t0 + j + 1
            cx = centers[j, 0]
            cy = centers[j, 1]
            ilo = <i64>floor((cx - r) / s)
            ihi = <i64>floor((cx + r) / s)
            klo = <i64>floor((cy - r) / s)
            khi = <i64>floor((cy + r) / s)
            for i in range(ilo, ihi + 1):
                if torus:
                    ii = ((i % m) + m) % m
                elif i < 0 or i >= m:
                    continue
                else:
                    ii = i
                x0 = i * s
                x1 = x0 + s
                nx = x0 - cx
                if cx - x1 > nx:
                    nx = cx - x1
                if nx < 0.0:
                    nx = 0.0
                fx = cx - x0
                if x1 - cx > fx:
                    fx = x1 - cx
                for k in range(klo, khi + 1):
                    if torus:
                        kk = ((k % m) + m) % m
                    elif k < 0 or k >= m:
                        continue
                    else:
                        kk = k
                    y0 = k * s
                    y1 = y0 + s
                    ny = y0 - cy
                    if cy - y1 > ny:
                        ny = cy - y1
                    if ny < 0.0:
                        ny = 0.0
                    fy = cy - y0
                    if y1 - cy > fy:
                        fy = y1 - cy
                    idx = ii * m + kk
                    if nx * nx + ny * ny <= r2 and outer_hit[idx] == 0:
                        outer_hit[idx] = t
                        state[1] -= 1
                        if state[1] == 0:
                            state[3] = t
                    if fx * fx + fy * fy <= r2 and inner_hit[idx] == 0:
                        inner_hit[idx] = t
                        state[0] -= 1
            if state[0] == 0:
                state[2] = t
                stop = j
                break
    return stop


def wilson(const i64[::1] indptr, const i64[::1] indices, const i64[::1] edge_ids,
           i64 root, const double[::1] u):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    nxt_arr = np.full(n, -1, dtype=np.int64)
    eid_arr = np.full(n, -1, dtype=np.int64)
    in_tree_arr = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] nxt = nxt_arr
    cdef i64[::1] eid = eid_arr
    cdef u8[::1] in_tree = in_tree_arr
    cdef Py_ssize_t pos = 0, npos = u.shape[0]
    cdef i64 i, v, d, c
    cdef bint exhausted = False
    with nogil:
        in_tree[root] = 1
        for i in range(n):
            v = i
            while not in_tree[v]:
                if pos >= npos:
                    exhausted = True
                    break
                d = indptr[v + 1] - indptr[v]
                c = indptr[v] + <i64>(u[pos] * d)
                if c >= indptr[v + 1]:
                    c = indptr[v + 1] - 1
                pos += 1
                nxt[v] = indices[c]
                eid[v] = edge_ids[c]
                v = nxt[v]
            if exhausted:
                break
            v = i
            while not in_tree[v]:
                in_tree[v] = 1
                v = nxt[v]
    if exhausted:
        return None, -1
    return eid_arr, pos
