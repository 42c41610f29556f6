"""Simple undirected graphs: generators, edge-list ingestion, CSR views."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """A simple graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` array with ``u < v`` in each row, sorted and
    free of duplicates. ``tag`` records the generator (or ``"edges"``) so
    the graph can be written back to a config.
    """

    n: int
    edges: np.ndarray
    tag: dict = field(default_factory=dict)
    transitive: bool = False

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise GraphError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0) if e.size else e
        object.__setattr__(self, "edges", e)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def csr(self):
        """Return ``(indptr, neighbours, edge_ids)`` sorted by neighbour."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        eid = np.arange(self.m, dtype=np.int64)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ids = np.concatenate([eid, eid])
        order = np.lexsort((dst, src))
        src, dst, ids = src[order], dst[order], ids[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(dst), np.ascontiguousarray(ids)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        indptr, nbr, _ = self.csr()
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in nbr[indptr[v]:indptr[v + 1]]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        return bool(seen.all())

    def laplacian(self) -> np.ndarray:
        L = np.zeros((self.n, self.n))
        u, v = self.edges[:, 0], self.edges[:, 1]
        np.add.at(L, (u, v), -1.0)
        np.add.at(L, (v, u), -1.0)
        L[np.diag_indices(self.n)] = self.degrees()
        return L

    def to_config(self) -> dict:
        if self.tag.get("generator"):
            return dict(self.tag)
        return {"n": self.n, "edges": self.edges.tolist()}


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    i = np.arange(n)
    return Graph(n, np.stack([i, (i + 1) % n], axis=1), {"generator": "cycle", "n": n}, True)


def complete(n: int) -> Graph:
    iu = np.triu_indices(n, 1)
    return Graph(n, np.stack(iu, axis=1), {"generator": "complete", "n": n}, True)


def random_regular(n: int, d: int, seed: int = 0) -> Graph:
    import networkx as nx

    if (n * d) % 2 or d >= n:
        raise GraphError("random regular graph needs n*d even and d < n")
    g = nx.random_regular_graph(d, n, seed=seed)
    tag = {"generator": "random_regular", "n": n, "d": d, "seed": seed}
    return Graph(n, np.array(list(g.edges()), dtype=np.int64), tag)


def path(n: int) -> Graph:
    i = np.arange(n - 1)
    return Graph(n, np.stack([i, i + 1], axis=1), {"generator": "path", "n": n})


def read_edgelist(p: str | Path, n: int | None = None) -> Graph:
    """Read whitespace-separated ``u v`` lines; ``#`` starts a comment."""
    rows = []
    for line in Path(p).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphError(f"bad edge line: {line!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"bad edge line: {line!r}") from None
    e = np.array(rows, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(e.max()) + 1 if e.size else 1
    return Graph(n, e, {})


def write_edgelist(g: Graph, p: str | Path) -> None:
    Path(p).write_text("".join(f"{u} {v}\n" for u, v in g.edges.tolist()))


def from_config(cfg: dict) -> Graph:
    gen = cfg.get("generator")
    if gen == "cycle":
        return cycle(int(cfg["n"]))
    if gen == "complete":
        return complete(int(cfg["n"]))
    if gen == "path":
        return path(int(cfg["n"]))
    if gen == "random_regular":
        return random_regular(int(cfg["n"]), int(cfg["d"]), int(cfg.get("seed", 0)))
    if gen is not None:
        raise GraphError(f"unknown graph generator {gen!r}")
    if "edgelist" in cfg:
        return read_edgelist(cfg["edgelist"], cfg.get("n"))
    if "edges" in cfg:
        return Graph(int(cfg["n"]), np.asarray(cfg["edges"], dtype=np.int64), {},
                     bool(cfg.get("transitive", False)))
    raise GraphError("graph config needs a generator, edges or an edgelist path")
