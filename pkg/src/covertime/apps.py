"""Covering problems in disguise: graph connectivity, disc coverage,
spanning-tree covering and random k-SAT."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels, graphs
from .intensity import PairIntensities, pair_intensities
from .model import HypercubeSubcube, SpanningTree
from .sim import RunSummary, pmap, summarize
from .streams import APP, stream

# sub-stream tags under APP
_CONNECT, _DISC, _TREE, _SAT = 1, 2, 3, 4


def _batch(t0: int, cap: int, lo: int = 64) -> int:
    return max(1, min(max(lo, t0 // 2), cap - t0))


# ---------------------------------------------------------------------------
# connectivity of the random multigraph process


def cut_coupon_time(n: int, i: int) -> float:
    """``log C(n,i) / -log(1 - i(n-i)/C(n,2))``: first-moment time for the i-set cut collector."""
    pairs = n * (n - 1) / 2
    p = i * (n - i) / pairs
    if p >= 1:
        return math.log(math.comb(n, i)) if math.comb(n, i) > 1 else 1.0
    return math.log(math.comb(n, i)) / -math.log1p(-p)


def connect_once(n: int, rng: np.random.Generator, cap: int | None = None):
    """Add uniform random edges until the multigraph is connected.

    Returns ``(T_connect, T_no_isolated)``; the second is the covering time
    of the single-vertex cut collector on the same edge stream.
    """
    if n < 2:
        raise ValueError("connectivity needs n >= 2")
    cap = cap or max(1000, 100 * math.ceil(n * math.log(n)))
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    touched = np.zeros(n, dtype=np.uint8)
    state = np.array([n, n, 0, 0], dtype=np.int64)
    t0 = 0
    while t0 < cap:
        b = _batch(t0, cap)
        u = np.minimum((rng.random(b) * n).astype(np.int64), n - 1)
        v = np.minimum((rng.random(b) * (n - 1)).astype(np.int64), n - 2)
        v = v + (v >= u)
        stop = _kernels.union_stream(parent, size, touched, u, v, t0, state)
        if stop >= 0:
            return int(state[2]), int(state[3])
        t0 += b
    return math.inf, (int(state[3]) if state[3] else math.inf)


@dataclass
class ConnectivityResult:
    connect: RunSummary
    isolated: RunSummary
    target: float
    t1: float
    coupled_ok: bool

    def prob_connected(self, t: float) -> float:
        return float(np.count_nonzero(self.connect.all_samples <= t) / self.connect.replicates)

    def to_dict(self) -> dict:
        return {"connect": self.connect.to_dict(), "isolated": self.isolated.to_dict(),
                "target_n_log_n_over_2": self.target, "cut_coupon_t1": self.t1,
                "coupled_ok": self.coupled_ok}


def connectivity_time(n: int, replicates: int, master_seed: int = 0,
                      threads: int | None = None) -> ConnectivityResult:
    res = pmap(lambda r: connect_once(n, stream(master_seed, APP, _CONNECT, r)), range(replicates), threads)
    tc = [a for a, _ in res]
    ti = [b for _, b in res]
    cap = max(1000, 100 * math.ceil(n * math.log(n)))
    ok = all(a >= b for a, b in res)
    return ConnectivityResult(summarize(tc, master_seed, cap), summarize(ti, master_seed, cap),
                              n * math.log(n) / 2, cut_coupon_time(n, 1), ok)


# ---------------------------------------------------------------------------
# disc coverage


def tiling(side: float, r: float, resolution: float = 0.1):
    """Tile count per side ``m`` and tile side ``s = side/m`` with ``s <= resolution * r``."""
    m = math.ceil(side / (resolution * r) - 1e-12)
    return m, side / m


def disc_once(area_n: float, r: float, torus: bool, rng: np.random.Generator,
              cap: int | None = None, resolution: float = 0.1):
    """Drop uniform discs until every tile is wholly inside some disc.

    Returns ``(T_inner, T_outer)``: the first time all tiles lie inside the
    union (an upper bound on the continuum covering time) and the first
    time all tiles meet it (a lower bound).
    """
    side = math.sqrt(area_n)
    m, s = tiling(side, r, resolution)
    cap = cap or max(1000, math.ceil(100 * area_n * max(math.log(area_n), 1.0) / (math.pi * r * r)))
    inner = np.zeros(m * m, dtype=np.int64)
    outer = np.zeros(m * m, dtype=np.int64)
    state = np.array([m * m, m * m, 0, 0], dtype=np.int64)
    t0 = 0
    while t0 < cap:
        b = _batch(t0, cap, 32)
        centers = np.ascontiguousarray(rng.random((b, 2)) * side)
        stop = _kernels.disc_cover(inner, outer, centers, m, s, r, bool(torus), t0, state)
        if stop >= 0:
            return int(state[2]), int(state[3])
        t0 += b
    return math.inf, (int(state[3]) if state[3] else math.inf)


@dataclass
class DiscResult:
    inner: RunSummary
    outer: RunSummary
    target: float
    tiles_per_side: int
    tile_side: float
    sandwich_ok: bool

    def to_dict(self) -> dict:
        return {"inner": self.inner.to_dict(), "outer": self.outer.to_dict(),
                "target_n_log_n_over_pi_r2": self.target, "tiles_per_side": self.tiles_per_side,
                "tile_side": self.tile_side, "sandwich_ok": self.sandwich_ok}


def disc_coverage_time(area_n: float, radius_r: float, surface: str = "torus", replicates: int = 100,
                       master_seed: int = 0, threads: int | None = None) -> DiscResult:
    if surface not in ("torus", "square"):
        raise ValueError("surface must be 'torus' or 'square'")
    if radius_r <= 0:
        raise ValueError("radius must be positive")
    side = math.sqrt(area_n)
    if radius_r >= side / 4:
        warnings.warn("radius is not small compared with the side length", stacklevel=2)
    torus = surface == "torus"
    res = pmap(lambda i: disc_once(area_n, radius_r, torus, stream(master_seed, APP, _DISC, i)),
               range(replicates), threads)
    m, s = tiling(side, radius_r)
    cap = max(1000, math.ceil(100 * area_n * max(math.log(area_n), 1.0) / (math.pi * radius_r ** 2)))
    ok = all(o <= i for i, o in res)
    return DiscResult(summarize([i for i, _ in res], master_seed, cap),
                      summarize([o for _, o in res], master_seed, cap),
                      area_n * math.log(area_n) / (math.pi * radius_r ** 2), m, s, ok)


# ---------------------------------------------------------------------------
# spanning-tree covering


def is_spanning_tree(g: graphs.Graph, edge_ids) -> bool:
    e = np.asarray(edge_ids, dtype=np.int64)
    if e.size != g.n - 1 or np.unique(e).size != e.size:
        return False
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges[e].tolist():
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def tree_cover_once(model: SpanningTree, rng: np.random.Generator, cap: int | None = None,
                    check: bool = True) -> int:
    g = model.graph
    m = g.m
    cap = cap or max(1000, math.ceil(100 * m * max(math.log(m), 1.0) / max(g.n - 1, 1)))
    first_hit = np.zeros(m, dtype=np.int64)
    deg = np.zeros(0, dtype=np.uint32)
    remaining = m
    empty = np.zeros(1, dtype=np.uint8)
    for t in range(cap):
        tree = model.tree(rng)
        if check and not is_spanning_tree(g, tree):
            raise AssertionError("sampler returned something other than a spanning tree")
        offsets = np.array([0, tree.size], dtype=np.int64)
        remaining, stop = _kernels.absorb(first_hit, deg, tree, offsets, empty, t, remaining)
        if stop >= 0:
            return t + 1
    return math.inf


@dataclass
class TreeCoverResult:
    summary: RunSummary
    target: float

    def to_dict(self) -> dict:
        return {"summary": self.summary.to_dict(), "target": self.target}


def spanning_tree_cover(graph: graphs.Graph, replicates: int, master_seed: int = 0,
                        threads: int | None = None, check: bool = True) -> TreeCoverResult:
    """Union uniform spanning trees until every edge is covered."""
    model = SpanningTree(graph, method="sample", estimate_draws=1)
    res = pmap(lambda i: tree_cover_once(model, stream(master_seed, APP, _TREE, i), check=check),
               range(replicates), threads)
    m, n = graph.m, graph.n
    target = m * math.log(m) / (n - 1) if m > 1 else 1.0
    return TreeCoverResult(summarize(res, master_seed, 0), target)


# ---------------------------------------------------------------------------
# random k-SAT


class SolverTimeout(RuntimeError):
    pass


def dpll(clauses, n_vars: int, budget: int = 1_000_000):
    """Satisfying assignment (dict var -> bool) or ``None``.

    Unit propagation, pure-literal elimination, branching on the variable
    with most occurrences. Raises ``SolverTimeout`` after ``budget`` nodes.
    """
    nodes = [0]

    def assign(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if -lit in c:
                c = tuple(x for x in c if x != -lit)
                if not c:
                    return None
            out.append(c)
        return out

    def solve(cls, asg):
        nodes[0] += 1
        if nodes[0] > budget:
            raise SolverTimeout(f"DPLL exceeded {budget} nodes")
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is not None:
                asg[abs(unit)] = unit > 0
                cls = assign(cls, unit)
                if cls is None:
                    return None
                continue
            lits = {x for c in cls for x in c}
            pure = [x for x in lits if -x not in lits]
            if pure:
                for x in pure:
                    asg[abs(x)] = x > 0
                    cls = assign(cls, x)
                continue
            break
        if not cls:
            return asg
        count = {}
        for c in cls:
            for x in c:
                count[x] = count.get(x, 0) + 1
        var = max({abs(x) for x in count}, key=lambda v: (count.get(v, 0) + count.get(-v, 0), -v))
        first = var if count.get(var, 0) >= count.get(-var, 0) else -var
        for lit in (first, -first):
            nxt = assign(cls, lit)
            if nxt is None:
                continue
            res = solve(nxt, {**asg, abs(lit): lit > 0})
            if res is not None:
                return res
        return None

    asg = solve([tuple(c) for c in clauses], {})
    if asg is None:
        return None
    return {v: asg.get(v, False) for v in range(1, n_vars + 1)}


def satisfies(assignment: dict, clause) -> bool:
    return any(assignment[abs(x)] == (x > 0) for x in clause)


def write_dimacs(clauses, n_vars: int, path) -> None:
    lines = [f"p cnf {n_vars} {len(clauses)}"]
    lines += [" ".join(str(x) for x in c) + " 0" for c in clauses]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dimacs(path):
    clauses, n_vars, cur = [], 0, []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            n_vars = int(line.split()[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
    return clauses, n_vars


@dataclass
class SatInstanceState:
    n_vars: int
    k: int
    clauses: list = field(default_factory=list)
    status: str = "sat"


def random_clause(model: HypercubeSubcube, rng) -> tuple:
    return tuple(model.random_clause(rng).literals())


def sat_once(n_vars: int, k: int, rng: np.random.Generator, budget: int = 1_000_000,
             cap: int | None = None) -> tuple[float, SatInstanceState]:
    """Add random k-clauses until unsatisfiable; returns ``(T, final state)``.

    The solver is only called when the newest clause falsifies the current
    witness assignment, since otherwise the witness still satisfies all
    clauses.
    """
    model = HypercubeSubcube(n_vars, k) if n_vars <= 30 else None
    if model is None:
        raise ValueError("exact mode supports n_vars <= 30")
    cap = cap or 100 * (2 ** k) * n_vars
    st = SatInstanceState(n_vars, k)
    witness = {v: False for v in range(1, n_vars + 1)}
    for t in range(1, cap + 1):
        c = random_clause(model, rng)
        st.clauses.append(c)
        if satisfies(witness, c):
            continue
        try:
            w = dpll(st.clauses, n_vars, budget)
        except SolverTimeout:
            st.status = "unknown"
            return math.inf, st
        if w is None:
            st.status = "unsat"
            return t, st
        witness = w
    return math.inf, st


def first_moment_ratio(k: int) -> float:
    """``log 2 / -log(1 - 2^-k)``: first-moment bound on ``T / n_vars``."""
    return math.log(2) / -math.log1p(-(2.0 ** -k))


@dataclass
class SatResult:
    summary: RunSummary
    n_vars: int
    k: int
    unknown: int
    first_moment_ratio: float
    threshold_asymptotic: float

    @property
    def median_ratio(self) -> float:
        return self.summary.median / self.n_vars

    def to_dict(self) -> dict:
        return {"summary": self.summary.to_dict(), "n_vars": self.n_vars, "k": self.k,
                "unknown": self.unknown, "median_ratio": self.median_ratio,
                "first_moment_ratio": self.first_moment_ratio,
                "first_moment_threshold_n_2k_log2": self.threshold_asymptotic}


def sat_threshold(n_vars: int, k: int, replicates: int, master_seed: int = 0,
                  budget: int = 1_000_000, threads: int | None = None) -> SatResult:
    res = pmap(lambda i: sat_once(n_vars, k, stream(master_seed, APP, _SAT, i), budget),
               range(replicates), threads)
    unknown = sum(1 for _, st in res if st.status == "unknown")
    return SatResult(summarize([t for t, _ in res], master_seed, 100 * 2 ** k * n_vars), n_vars, k,
                     unknown, first_moment_ratio(k), n_vars * 2.0 ** k * math.log(2))


def subcube_pair_table(d: int, k: int) -> np.ndarray:
    """``q_xy`` for Hamming distance ``i = 0..d``; zero beyond ``d - k``."""
    m = HypercubeSubcube(d, k)
    return np.array([m.distance_prob(i) for i in range(d + 1)])


def subcube_pair_profile(d: int, k: int) -> PairIntensities:
    """Pair intensities of the subcube model by Hamming-distance class."""
    return pair_intensities(HypercubeSubcube(d, k), dense=False)
