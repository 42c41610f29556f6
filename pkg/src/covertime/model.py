"""Coupon distributions over subsets of ``range(n)`` and their samplers.

A coupon is returned as a sorted ``int64`` array of element indices. For
simulation, :meth:`CouponModel.draw_batch` returns many coupons at once in
CSR form (``members``, ``offsets``) together with a ``full`` flag per
coupon, so coupons equal to the whole ground set never need to be
materialized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels, graphs
from .graphs import Graph

# above this many members per draw, the subcube coupon stays symbolic
MATERIALIZE_MAX_D = 20
SUBCUBE_MAX_D = 30


class ModelError(ValueError):
    """A coupon model violates its invariants."""


class NotClosedForm(LookupError):
    """Raised by ``pair_prob`` when no exact value is available."""


class CouponBatch(NamedTuple):
    members: np.ndarray
    offsets: np.ndarray
    full: np.ndarray

    def __len__(self):
        return self.offsets.shape[0] - 1

    def coupon(self, j: int) -> np.ndarray:
        return self.members[self.offsets[j]:self.offsets[j + 1]]


@dataclass(frozen=True)
class Clause:
    """A k-clause, stored as the subcube of assignments that falsify it.

    ``variables[i]`` is fixed to ``values[i]`` on the subcube. The literal on
    variable ``v`` is positive exactly when the falsifying value is 0.
    """

    d: int
    variables: tuple[int, ...]
    values: tuple[int, ...]

    def literals(self) -> list[int]:
        """DIMACS literals (1-based, negative for negated variables)."""
        return [(v + 1) if b == 0 else -(v + 1) for v, b in zip(self.variables, self.values)]

    def contains(self, x: int) -> bool:
        return all(((x >> v) & 1) == b for v, b in zip(self.variables, self.values))

    def members(self) -> np.ndarray:
        if self.d > SUBCUBE_MAX_D:
            raise ModelError(f"refusing to materialize a subcube of Q_{self.d}")
        return _subcube_members(self.d, self.variables, self.values)


def _subcube_members(d, variables, values) -> np.ndarray:
    base = 0
    for v, b in zip(variables, values):
        base |= int(b) << int(v)
    free = [i for i in range(d) if i not in set(variables)]
    pts = np.zeros(1 << len(free), dtype=np.int64)
    m = np.arange(1 << len(free), dtype=np.int64)
    for i, f in enumerate(free):
        pts |= ((m >> i) & 1) << f
    return np.sort(pts + base)


def _gather(indptr: np.ndarray, data: np.ndarray, rows: np.ndarray):
    """Concatenate CSR rows ``rows``; returns (members, offsets)."""
    lengths = indptr[rows + 1] - indptr[rows]
    offsets = np.zeros(rows.shape[0] + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    total = int(offsets[-1])
    pos = np.arange(total, dtype=np.int64) - np.repeat(offsets[:-1] - indptr[rows], lengths)
    return data[pos], offsets


def _batch(members, offsets, full=None) -> CouponBatch:
    nb = offsets.shape[0] - 1
    if full is None:
        full = np.zeros(nb, dtype=np.uint8)
    return CouponBatch(np.ascontiguousarray(members, dtype=np.int64),
                       np.ascontiguousarray(offsets, dtype=np.int64),
                       np.ascontiguousarray(full, dtype=np.uint8))


class CouponModel:
    """Base class. Subclasses are frozen dataclasses."""

    kind: str = ""
    n: int

    exchangeable = False
    transitive = False

    # -- sampling -------------------------------------------------------
    def sample(self, rng: np.random.Generator):
        b = self.draw_batch(rng, 1)
        if b.full[0]:
            return np.arange(self.n, dtype=np.int64)
        return np.sort(b.coupon(0))

    def draw_batch(self, rng: np.random.Generator, size: int) -> CouponBatch:
        raise NotImplementedError

    # -- intensities ----------------------------------------------------
    def element_probs(self) -> np.ndarray:
        raise NotImplementedError

    def element_prob(self, x: int) -> float:
        self._check_index(x)
        return float(self.element_probs()[x])

    def pair_prob(self, x: int, y: int) -> float:
        raise NotClosedForm(self.kind)

    def pair_matrix(self) -> np.ndarray:
        """Dense ``q_xy`` with ``q_xx = q_x``; only for small ``n``."""
        q = np.empty((self.n, self.n))
        for x in range(self.n):
            for y in range(self.n):
                q[x, y] = self.element_prob(x) if x == y else self.pair_prob(x, y)
        return q

    def pair_spectrum(self):
        """Multiset ``[(q_xy, count), ...]`` over ``y != x``, identical for every x.

        Only defined for models whose pair structure looks the same from
        every element; ``None`` otherwise.
        """
        return None

    def size_law(self):
        """``(sizes, probs)`` of ``|X|`` when known exactly, else ``None``."""
        return None

    @property
    def balanced(self) -> bool:
        q = self.element_probs()
        return bool(np.ptp(q) <= 1e-9 * max(q.max(), 1e-300))

    @property
    def mean_size(self) -> float:
        law = self.size_law()
        if law is not None:
            return float(np.dot(law[0], law[1]))
        return float(np.sum(self.element_probs()))

    @property
    def max_size(self) -> int:
        law = self.size_law()
        return int(np.max(law[0][law[1] > 0]))

    @property
    def mean_sq_size(self) -> float:
        s, p = self.size_law()
        return float(np.dot(np.asarray(s, float) ** 2, p))

    def _check_index(self, *xs):
        for x in xs:
            if not 0 <= x < self.n:
                raise IndexError(f"element {x} outside [0, {self.n})")

    def _check_pair(self, x, y):
        self._check_index(x, y)
        if x == y:
            raise ValueError("pair_prob needs x != y; use element_prob")

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Explicit(CouponModel):
    """A finite list of ``(subset, probability)`` pairs."""

    n: int
    support: tuple
    kind = "explicit"

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("n must be positive")
        sets, probs = [], []
        for members, p in self.support:
            m = np.unique(np.asarray(list(members), dtype=np.int64))
            if m.size and (m[0] < 0 or m[-1] >= self.n):
                raise ModelError("support member outside [0, n)")
            if not p > 0:
                raise ModelError("support probabilities must be positive")
            sets.append(m)
            probs.append(float(p))
        if not sets:
            raise ModelError("empty support")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ModelError(f"support probabilities sum to {math.fsum(probs)!r}, not 1")
        probs = np.array(probs)
        indptr = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum([s.size for s in sets], out=indptr[1:])
        object.__setattr__(self, "support", tuple((tuple(s.tolist()), p) for s, p in zip(sets, probs)))
        object.__setattr__(self, "_probs", probs)
        object.__setattr__(self, "_cdf", np.cumsum(probs))
        object.__setattr__(self, "_indptr", indptr)
        object.__setattr__(self, "_data", np.concatenate(sets) if indptr[-1] else np.zeros(0, np.int64))
        object.__setattr__(self, "_masks", tuple(sum(1 << int(v) for v in s) for s in sets))

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def masks(self) -> tuple[int, ...]:
        """Support sets as Python-int bitmasks (bit v set iff v in the set)."""
        return self._masks

    def draw_batch(self, rng, size):
        u = rng.random(size)
        rows = np.minimum(np.searchsorted(self._cdf, u, side="right"), len(self._probs) - 1)
        members, offsets = _gather(self._indptr, self._data, rows)
        return _batch(members, offsets)

    def element_probs(self):
        q = np.zeros(self.n)
        for (members, _), p in zip(self.support, self._probs):
            q[list(members)] += p
        return q

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        bits = (1 << x) | (1 << y)
        return float(math.fsum(p for m, p in zip(self._masks, self._probs) if m & bits == bits))

    def pair_matrix(self):
        q = np.zeros((self.n, self.n))
        for (members, _), p in zip(self.support, self._probs):
            idx = np.asarray(members, dtype=np.int64)
            q[np.ix_(idx, idx)] += p
        return q

    def size_law(self):
        sizes = np.array([len(m) for m, _ in self.support])
        vals = np.unique(sizes)
        return vals, np.array([self._probs[sizes == v].sum() for v in vals])

    def to_config(self):
        return {"kind": self.kind, "n": self.n,
                "support": [[list(m), float(p)] for m, p in self.support]}


@dataclass(frozen=True, eq=False)
class KUniform(CouponModel):
    """A uniformly random k-subset."""

    n: int
    k: int
    kind = "k_uniform"
    exchangeable = True
    transitive = True

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ModelError("k-uniform model needs 1 <= k <= n")

    def draw_batch(self, rng, size):
        if self.k == self.n:
            return _batch(np.zeros(0, np.int64), np.zeros(size + 1, np.int64), np.ones(size, np.uint8))
        u = rng.random((size, self.k))
        sub = _kernels.floyd_sample(self.n, self.k, u)
        return _batch(sub.ravel(), np.arange(size + 1, dtype=np.int64) * self.k)

    def element_probs(self):
        return np.broadcast_to(np.float64(self.k / self.n), (self.n,))

    def element_prob(self, x):
        self._check_index(x)
        return self.k / self.n

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        return self.k * (self.k - 1) / (self.n * (self.n - 1))

    def pair_matrix(self):
        q = np.full((self.n, self.n), self.k * (self.k - 1) / (self.n * (self.n - 1)) if self.n > 1 else 0.0)
        np.fill_diagonal(q, self.k / self.n)
        return q

    def pair_spectrum(self):
        if self.n == 1:
            return []
        return [(self.k * (self.k - 1) / (self.n * (self.n - 1)), self.n - 1)]

    def size_law(self):
        return np.array([self.k]), np.array([1.0])

    @property
    def balanced(self):
        return True

    def to_config(self):
        return {"kind": self.kind, "n": self.n, "k": self.k}


@dataclass(frozen=True, eq=False)
class Lottery(CouponModel):
    """A uniform singleton, or with probability ``p`` the whole ground set."""

    n: int
    p: float
    kind = "lottery"
    exchangeable = True
    transitive = True

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("n must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ModelError("lottery probability must lie in [0, 1]")

    @property
    def c(self) -> float:
        return self.p * self.n

    def draw_batch(self, rng, size):
        win = rng.random(size) < self.p
        single = np.minimum((rng.random(size) * self.n).astype(np.int64), self.n - 1)
        sizes = (~win).astype(np.int64)
        offsets = np.zeros(size + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        return _batch(single[~win], offsets, win.astype(np.uint8))

    def element_probs(self):
        return np.broadcast_to(np.float64(self.p + (1 - self.p) / self.n), (self.n,))

    def element_prob(self, x):
        self._check_index(x)
        return self.p + (1 - self.p) / self.n

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        return self.p

    def pair_matrix(self):
        q = np.full((self.n, self.n), self.p)
        np.fill_diagonal(q, self.p + (1 - self.p) / self.n)
        return q

    def pair_spectrum(self):
        return [(self.p, self.n - 1)] if self.n > 1 else []

    def size_law(self):
        if self.n == 1:
            return np.array([1]), np.array([1.0])
        return np.array([1, self.n]), np.array([1 - self.p, self.p])

    @property
    def balanced(self):
        return True

    def to_config(self):
        return {"kind": self.kind, "n": self.n, "p": self.p}


@dataclass(frozen=True, eq=False)
class BlockPartition(CouponModel):
    """Ground set split into ``blocks`` consecutive blocks of size ``k``; a coupon is one block."""

    blocks: int
    k: int
    kind = "block_partition"
    transitive = True

    def __post_init__(self):
        if self.blocks < 1 or self.k < 1:
            raise ModelError("block partition needs blocks >= 1 and k >= 1")

    @property
    def n(self) -> int:
        return self.blocks * self.k

    def partition(self) -> list[np.ndarray]:
        return [np.arange(i * self.k, (i + 1) * self.k) for i in range(self.blocks)]

    def draw_batch(self, rng, size):
        b = np.minimum((rng.random(size) * self.blocks).astype(np.int64), self.blocks - 1)
        members = (b[:, None] * self.k + np.arange(self.k)[None, :]).ravel()
        return _batch(members, np.arange(size + 1, dtype=np.int64) * self.k)

    def element_probs(self):
        return np.broadcast_to(np.float64(1 / self.blocks), (self.n,))

    def element_prob(self, x):
        self._check_index(x)
        return 1 / self.blocks

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        return 1 / self.blocks if x // self.k == y // self.k else 0.0

    def pair_matrix(self):
        blk = np.arange(self.n) // self.k
        return np.where(blk[:, None] == blk[None, :], 1 / self.blocks, 0.0)

    def pair_spectrum(self):
        out = []
        if self.k > 1:
            out.append((1 / self.blocks, self.k - 1))
        if self.blocks > 1:
            out.append((0.0, self.n - self.k))
        return out

    def size_law(self):
        return np.array([self.k]), np.array([1.0])

    @property
    def balanced(self):
        return True

    def to_config(self):
        return {"kind": self.kind, "blocks": self.blocks, "k": self.k}


@dataclass(frozen=True, eq=False)
class GraphNeighborhood(CouponModel):
    """Closed neighbourhood of a uniformly random vertex."""

    graph: Graph
    kind = "graph_neighborhood"

    def __post_init__(self):
        g = self.graph
        indptr, nbr, _ = g.csr()
        # insert each vertex into its own row, keeping rows sorted
        rows = [np.sort(np.append(nbr[indptr[v]:indptr[v + 1]], v)) for v in range(g.n)]
        cptr = np.zeros(g.n + 1, dtype=np.int64)
        np.cumsum([r.size for r in rows], out=cptr[1:])
        object.__setattr__(self, "_indptr", cptr)
        object.__setattr__(self, "_data", np.concatenate(rows))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def transitive(self) -> bool:
        return self.graph.transitive

    @property
    def exchangeable(self) -> bool:
        return self.graph.m == self.n * (self.n - 1) // 2

    def draw_batch(self, rng, size):
        rows = np.minimum((rng.random(size) * self.n).astype(np.int64), self.n - 1)
        members, offsets = _gather(self._indptr, self._data, rows)
        return _batch(members, offsets)

    def element_probs(self):
        return (self.graph.degrees() + 1) / self.n

    def _closed_adjacency(self) -> np.ndarray:
        a = np.eye(self.n)
        e = self.graph.edges
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        nx_ = set(self._data[self._indptr[x]:self._indptr[x + 1]].tolist())
        ny_ = set(self._data[self._indptr[y]:self._indptr[y + 1]].tolist())
        return len(nx_ & ny_) / self.n

    def pair_matrix(self):
        a = self._closed_adjacency()
        return a @ a / self.n

    def pair_spectrum(self):
        if not self.transitive:
            return None
        row = self.pair_matrix()[0]
        vals, counts = np.unique(np.delete(row, 0), return_counts=True)
        return [(float(v), int(c)) for v, c in zip(vals, counts)]

    def size_law(self):
        sizes = self.graph.degrees() + 1
        vals, counts = np.unique(sizes, return_counts=True)
        return vals, counts / self.n

    def to_config(self):
        return {"kind": self.kind, "graph": self.graph.to_config()}


@dataclass(frozen=True, eq=False)
class HypercubeSubcube(CouponModel):
    """A uniform ``(d-k)``-dimensional subcube of ``{0,1}^d``.

    Elements are assignments encoded as integers (bit ``v`` is variable
    ``v``). The coupon is the set of assignments falsifying a uniform random
    k-clause.
    """

    d: int
    k: int
    kind = "hypercube_subcube"
    transitive = True

    def __post_init__(self):
        if self.d < 1 or not 0 <= self.k <= self.d:
            raise ModelError("subcube model needs d >= 1 and 0 <= k <= d")
        if self.d > SUBCUBE_MAX_D:
            raise ModelError(f"d={self.d} exceeds the supported maximum {SUBCUBE_MAX_D}")

    @property
    def n(self) -> int:
        return 1 << self.d

    @property
    def materialized(self) -> bool:
        return self.d <= MATERIALIZE_MAX_D

    def random_clause(self, rng) -> Clause:
        u = rng.random((1, self.k))
        bits = rng.random(self.k) < 0.5
        variables = _kernels.floyd_sample(self.d, self.k, u)[0] if self.k else np.zeros(0, np.int64)
        return Clause(self.d, tuple(int(v) for v in variables), tuple(int(b) for b in bits))

    def sample(self, rng, materialize: bool | None = None):
        clause = self.random_clause(rng)
        if materialize is None:
            materialize = self.materialized
        return clause.members() if materialize else clause

    def draw_batch(self, rng, size):
        if not self.materialized:
            raise ModelError(f"subcube coupons on Q_{self.d} are not materialized (d > {MATERIALIZE_MAX_D})")
        m = 1 << (self.d - self.k)
        members = np.empty(size * m, dtype=np.int64)
        for j in range(size):
            c = self.random_clause(rng)
            members[j * m:(j + 1) * m] = _subcube_members(self.d, c.variables, c.values)
        return _batch(members, np.arange(size + 1, dtype=np.int64) * m)

    def element_probs(self):
        return np.broadcast_to(np.float64(2.0 ** -self.k), (self.n,))

    def element_prob(self, x):
        self._check_index(x)
        return 2.0 ** -self.k

    def distance_prob(self, i: int) -> float:
        """``q_xy`` for two assignments at Hamming distance ``i``."""
        return math.comb(self.d - i, self.k) / (2 ** self.k * math.comb(self.d, self.k))

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        return self.distance_prob(int(x ^ y).bit_count())

    def pair_matrix(self):
        x = np.arange(self.n)
        dist = np.vectorize(lambda z: int(z).bit_count())(x[:, None] ^ x[None, :])
        table = np.array([self.distance_prob(i) for i in range(self.d + 1)])
        return table[dist]

    def pair_spectrum(self):
        return [(self.distance_prob(i), math.comb(self.d, i)) for i in range(1, self.d + 1)]

    def size_law(self):
        return np.array([1 << (self.d - self.k)]), np.array([1.0])

    @property
    def balanced(self):
        return True

    def to_config(self):
        return {"kind": self.kind, "d": self.d, "k": self.k}


@dataclass(frozen=True, eq=False)
class SpanningTree(CouponModel):
    """Edge set of a uniform spanning tree of a connected graph.

    Trees are drawn with Wilson's algorithm. Edge and edge-pair inclusion
    probabilities come from the transfer-current matrix
    ``Y = B L^+ B^T``: ``q_e = Y_ee`` (effective resistance) and
    ``q_ef = Y_ee Y_ff - Y_ef^2``. With ``method="sample"`` they are
    estimated from ``estimate_draws`` trees instead.
    """

    graph: Graph
    method: str = "exact"
    estimate_draws: int = 10_000
    kind = "spanning_tree"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.graph.m == 0 and self.graph.n > 1:
            raise ModelError("spanning tree model needs edges")
        if not self.graph.is_connected():
            raise ModelError("spanning tree model needs a connected graph")
        if self.method not in ("exact", "sample"):
            raise ModelError("method must be 'exact' or 'sample'")
        object.__setattr__(self, "_csr", self.graph.csr())

    @property
    def n(self) -> int:
        return self.graph.m

    @property
    def transitive(self) -> bool:
        return self.graph.transitive

    def tree(self, rng) -> np.ndarray:
        indptr, nbr, eids = self._csr
        nv = self.graph.n
        u = rng.random(16 * nv + 16)
        while True:
            eid, used = _kernels.wilson(indptr, nbr, eids, 0, u)
            if used >= 0:
                return np.sort(eid[eid >= 0])
            u = np.concatenate([u, rng.random(u.shape[0])])

    def draw_batch(self, rng, size):
        k = self.graph.n - 1
        members = np.empty(size * k, dtype=np.int64)
        for j in range(size):
            members[j * k:(j + 1) * k] = self.tree(rng)
        return _batch(members, np.arange(size + 1, dtype=np.int64) * k)

    def transfer_current(self) -> np.ndarray:
        if "Y" not in self._cache:
            g = self.graph
            B = np.zeros((g.m, g.n))
            B[np.arange(g.m), g.edges[:, 0]] = 1.0
            B[np.arange(g.m), g.edges[:, 1]] = -1.0
            self._cache["Y"] = B @ np.linalg.pinv(g.laplacian()) @ B.T
        return self._cache["Y"]

    def element_probs(self):
        if self.method == "exact":
            return np.clip(np.diag(self.transfer_current()).copy(), 0.0, 1.0)
        if "q_est" not in self._cache:
            from .streams import ESTIMATE, stream

            rng = stream(0, ESTIMATE, self.graph.n, self.graph.m)
            counts = np.zeros(self.n)
            for _ in range(self.estimate_draws):
                counts[self.tree(rng)] += 1
            self._cache["q_est"] = counts / self.estimate_draws
        return self._cache["q_est"]

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        if self.method != "exact":
            raise NotClosedForm("spanning_tree with method='sample'")
        Y = self.transfer_current()
        return float(max(Y[x, x] * Y[y, y] - Y[x, y] ** 2, 0.0))

    def pair_matrix(self):
        if self.method != "exact":
            raise NotClosedForm("spanning_tree with method='sample'")
        Y = self.transfer_current()
        d = np.diag(Y)
        q = np.clip(np.outer(d, d) - Y ** 2, 0.0, 1.0)
        np.fill_diagonal(q, np.clip(d, 0.0, 1.0))
        return q

    def pair_spectrum(self):
        if not self.transitive or self.method != "exact":
            return None
        row = np.delete(self.pair_matrix()[0], 0)
        vals = np.round(row, 12)
        u, counts = np.unique(vals, return_counts=True)
        return [(float(v), int(c)) for v, c in zip(u, counts)]

    def size_law(self):
        return np.array([self.graph.n - 1]), np.array([1.0])

    @property
    def balanced(self):
        q = self.element_probs()
        return bool(np.ptp(q) <= 1e-9 * max(q.max(), 1e-300))

    def to_config(self):
        cfg = {"kind": self.kind, "graph": self.graph.to_config()}
        if self.method != "exact":
            cfg["method"] = self.method
        return cfg


@dataclass(frozen=True, eq=False)
class FullSet(CouponModel):
    """Every coupon is the whole ground set (degenerate test model)."""

    n: int
    kind = "full"
    exchangeable = True
    transitive = True

    def draw_batch(self, rng, size):
        return _batch(np.zeros(0, np.int64), np.zeros(size + 1, np.int64), np.ones(size, np.uint8))

    def element_probs(self):
        return np.ones(self.n)

    def pair_prob(self, x, y):
        self._check_pair(x, y)
        return 1.0

    def pair_spectrum(self):
        return [(1.0, self.n - 1)] if self.n > 1 else []

    def size_law(self):
        return np.array([self.n]), np.array([1.0])

    def to_config(self):
        return {"kind": self.kind, "n": self.n}


def sample(model: CouponModel, rng: np.random.Generator):
    """Draw one coupon from ``model`` using the caller's stream."""
    return model.sample(rng)


def element_prob(model: CouponModel, x: int) -> float:
    return model.element_prob(x)


def pair_prob(model: CouponModel, x: int, y: int) -> float:
    return model.pair_prob(x, y)


def from_config(cfg: dict) -> CouponModel:
    """Build a model from its JSON config block; raises ``ModelError``."""
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    try:
        if kind == "explicit":
            return Explicit(int(cfg["n"]), tuple((tuple(m), float(p)) for m, p in cfg["support"]))
        if kind == "k_uniform":
            return KUniform(int(cfg["n"]), int(cfg["k"]))
        if kind == "lottery":
            n = int(cfg["n"])
            if "p" in cfg and "c" in cfg:
                raise ModelError("give either p or c for a lottery model, not both")
            p = float(cfg["p"]) if "p" in cfg else float(cfg["c"]) / n
            return Lottery(n, p)
        if kind == "block_partition":
            return BlockPartition(int(cfg["blocks"]), int(cfg["k"]))
        if kind == "graph_neighborhood":
            return GraphNeighborhood(graphs.from_config(cfg["graph"]))
        if kind == "hypercube_subcube":
            return HypercubeSubcube(int(cfg["d"]), int(cfg["k"]))
        if kind == "spanning_tree":
            return SpanningTree(graphs.from_config(cfg["graph"]), cfg.get("method", "exact"))
        if kind == "full":
            return FullSet(int(cfg["n"]))
    except graphs.GraphError as exc:
        raise ModelError(str(exc)) from exc
    except KeyError as exc:
        raise ModelError(f"{kind} model is missing field {exc.args[0]!r}") from exc
    raise ModelError(f"unknown model kind {kind!r}")
