"""Exact covering-time laws for small or exchangeable instances.

Three independent routes:

* inclusion-exclusion over uncovered sets (``n <= 20``);
* the absorbing chain over covered sets (``n <= 16``);
* a chain over the covered count for exchangeable coupons.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import model as M

IE_MAX_N = 20
CHAIN_MAX_N = 16
EXCH_MAX_N = 10 ** 6
EXCH_MAX_SIZES = 1000


class OracleSizeError(ValueError):
    """The instance exceeds the oracle's size cap."""


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """``pmf[t] = P(T = t)`` for ``t <= t_max`` (``pmf[0]`` is 0 unless n = 0)."""

    pmf: np.ndarray
    tail_mass: float
    expected_T: float
    expected_T_error: float = 0.0

    @property
    def t_max(self) -> int:
        return self.pmf.shape[0] - 1

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf)

    def quantile(self, p: float) -> int:
        """Least ``t`` with ``P(T <= t) >= p``."""
        c = self.cdf()
        i = int(np.searchsorted(c, p - 1e-15, side="left"))
        if i > self.t_max:
            raise ValueError("quantile lies beyond t_max")
        return i

    def median(self) -> int:
        return self.quantile(0.5)

    def prob_greater(self, t: float) -> float:
        """``P(T > t)``."""
        k = math.floor(t)
        if k < 0:
            return 1.0
        if k >= self.t_max:
            return self.tail_mass
        return float(math.fsum(self.pmf[k + 1:].tolist()) + self.tail_mass)

    def to_dict(self, truncate: float = 1e-12) -> dict:
        nz = np.flatnonzero(self.pmf > truncate)
        return {"pmf": {str(int(t)): float(self.pmf[t]) for t in nz},
                "tail_mass": self.tail_mass, "expected_T": self.expected_T,
                "expected_T_error": self.expected_T_error, "t_max": self.t_max}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def total_variation(p, q) -> float:
    p, q = np.asarray(p, float), np.asarray(q, float)
    m = max(p.shape[0], q.shape[0])
    p = np.pad(p, (0, m - p.shape[0]))
    q = np.pad(q, (0, m - q.shape[0]))
    return 0.5 * math.fsum(np.abs(p - q).tolist())


def as_explicit(model: M.CouponModel) -> M.Explicit:
    """Enumerate the support of a small model as an ``Explicit`` model."""
    if isinstance(model, M.Explicit):
        return model
    n = model.n
    if n > IE_MAX_N:
        raise OracleSizeError(f"n={n} is too large to enumerate")
    if isinstance(model, M.KUniform):
        combos = list(itertools.combinations(range(n), model.k))
        return M.Explicit(n, tuple((c, 1 / len(combos)) for c in combos))
    if isinstance(model, M.Lottery):
        sup = [((x,), (1 - model.p) / n) for x in range(n)] if model.p < 1 else []
        if model.p > 0:
            sup.append((tuple(range(n)), model.p))
        return M.Explicit(n, tuple(sup))
    if isinstance(model, M.BlockPartition):
        return M.Explicit(n, tuple((tuple(b.tolist()), 1 / model.blocks) for b in model.partition()))
    if isinstance(model, M.GraphNeighborhood):
        return M.Explicit(n, tuple((tuple(model._data[model._indptr[v]:model._indptr[v + 1]].tolist()), 1 / n)
                                   for v in range(n)))
    if isinstance(model, M.HypercubeSubcube):
        sup = []
        nc = math.comb(model.d, model.k) * 2 ** model.k
        for vs in itertools.combinations(range(model.d), model.k):
            for bits in itertools.product((0, 1), repeat=model.k):
                sup.append((tuple(M._subcube_members(model.d, vs, bits).tolist()), 1 / nc))
        return M.Explicit(n, tuple(sup))
    if isinstance(model, M.FullSet):
        return M.Explicit(n, ((tuple(range(n)), 1.0),))
    raise TypeError(f"cannot enumerate a {model.kind} model")


def avoid_probs(model: M.CouponModel) -> np.ndarray:
    """``p_A = P(X and A disjoint)`` for every subset mask ``A`` of ``range(n)``."""
    ex = as_explicit(model)
    n = ex.n
    if n > IE_MAX_N:
        raise OracleSizeError(f"inclusion-exclusion refused for n={n} > {IE_MAX_N}")
    full = (1 << n) - 1
    g = np.zeros(1 << n)
    for mask, p in zip(ex.masks, ex.probs):
        g[full ^ mask] += p
    # superset sums: p_A = sum over B containing A of g[B]
    idx = np.arange(1 << n)
    for i in range(n):
        bit = 1 << i
        lo = idx[(idx & bit) == 0]
        g[lo] += g[lo | bit]
    return np.minimum(g, 1.0)


def _popcount(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc += (idx >> i) & 1
    return pc


def _ie_sum(signs_sizes, values) -> float:
    # descending |A| order, compensated
    order = np.argsort(-signs_sizes, kind="stable")
    return math.fsum(values[order].tolist())


def cover_prob_ie(model: M.CouponModel, t: int, _cache=None) -> float:
    """``P(C_t = V) = sum_A (-1)^|A| p_A^t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    pa = avoid_probs(model) if _cache is None else _cache[0]
    pc = _popcount(int(round(math.log2(pa.shape[0])))) if _cache is None else _cache[1]
    if t == 0:
        return 1.0 if pa.shape[0] == 1 else 0.0
    vals = np.where(pc % 2 == 0, 1.0, -1.0) * pa ** t
    return min(max(_ie_sum(pc, vals), 0.0), 1.0)


def ie_pmf(model: M.CouponModel, t_max: int) -> np.ndarray:
    pa = avoid_probs(model)
    pc = _popcount(int(round(math.log2(pa.shape[0]))))
    cdf = np.array([cover_prob_ie(model, t, (pa, pc)) for t in range(t_max + 1)])
    return np.diff(cdf, prepend=0.0)


def expected_T_ie(model: M.CouponModel) -> float:
    """``E T = sum_{A nonempty} (-1)^{|A|+1} / (1 - p_A)``; ``inf`` if some ``p_A = 1``."""
    pa = avoid_probs(model)
    n = int(round(math.log2(pa.shape[0])))
    pc = _popcount(n)
    pa, pc = pa[1:], pc[1:]
    if np.any(pa >= 1.0 - 1e-15):
        return math.inf
    vals = np.where(pc % 2 == 1, 1.0, -1.0) / (1.0 - pa)
    return _ie_sum(pc, vals)


def _default_horizon(n: int, q_star: float, tol: float = 1e-16) -> int:
    if q_star >= 1:
        return 1
    return max(1, math.ceil((math.log(tol) - math.log(max(n, 1))) / math.log1p(-q_star)))


def chain_distribution(model: M.CouponModel, t_max: int | None = None) -> ExactDistribution:
    """Advance the distribution of the covered set for ``t_max`` draws."""
    ex = as_explicit(model)
    n = ex.n
    if n > CHAIN_MAX_N:
        raise OracleSizeError(f"chain oracle refused for n={n} > {CHAIN_MAX_N}")
    q = ex.element_probs()
    q_star = float(q.min())
    if t_max is None:
        t_max = _default_horizon(n, q_star) if q_star > 0 else 1000
    full = (1 << n) - 1
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    state = np.zeros(size)
    state[0] = 1.0
    pmf = np.zeros(t_max + 1)
    survival = [1.0]
    for t in range(1, t_max + 1):
        new = np.zeros(size)
        for mask, p in zip(ex.masks, ex.probs):
            new += np.bincount(idx | mask, weights=state * p, minlength=size)
        pmf[t] = new[full]
        new[full] = 0.0
        state = new
        survival.append(math.fsum(state.tolist()))
    tail = survival[-1]
    et = math.fsum(survival[:-1])
    err = 0.0
    if tail > 0:
        err = n * (1 - q_star) ** t_max / q_star if q_star > 0 else math.inf
        et += tail  # the last term of the survival sum, exact; the rest is bounded by err
    return ExactDistribution(pmf, tail, et, err)


def _log_comb(a, b):
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    ok = (b >= 0) & (b <= a)
    out = np.full(a.shape, -np.inf)
    out[ok] = gammaln(a[ok] + 1) - gammaln(b[ok] + 1) - gammaln(a[ok] - b[ok] + 1)
    return out


def _hypergeom(n, good, k, j):
    """``P[c, j] = C(good_c, j) C(n - good_c, k - j) / C(n, k)``, in log space."""
    good = np.asarray(good)[:, None]
    j = np.asarray(j)[None, :]
    lp = _log_comb(good, j) + _log_comb(n - good, k - j) - _log_comb(n, k)
    return np.exp(lp)


def _normalize_law(size_law):
    if isinstance(size_law, dict):
        sizes = np.array(sorted(size_law), dtype=np.int64)
        probs = np.array([size_law[k] for k in sizes], dtype=float)
    else:
        sizes = np.asarray(size_law[0], dtype=np.int64)
        probs = np.asarray(size_law[1], dtype=float)
    keep = probs > 0
    return sizes[keep], probs[keep]


def exchangeable_exact(n: int, size_law, t_max: int | None = None,
                       tail_tol: float = 1e-15) -> ExactDistribution:
    """Exact law of ``T`` for an exchangeable collector with the given size law.

    The covered count ``c`` is a Markov chain: a coupon of size ``k`` adds
    ``j`` new elements with hypergeometric probability
    ``C(n-c, j) C(c, k-j) / C(n, k)``. ``expected_T`` solves the
    first-step equations exactly.
    """
    if n > EXCH_MAX_N:
        raise OracleSizeError(f"exchangeable oracle refused for n={n} > {EXCH_MAX_N}")
    sizes, probs = _normalize_law(size_law)
    if sizes.size > EXCH_MAX_SIZES:
        raise OracleSizeError("size law has too many support points")
    if abs(probs.sum() - 1) > 1e-9:
        raise ValueError("size law must sum to 1")
    if sizes.min() < 0 or sizes.max() > n:
        raise ValueError("coupon sizes must lie in [0, n]")
    kmax = int(sizes.max())
    c = np.arange(n + 1)
    # P[c, j] = probability that one coupon adds j new elements at count c
    P = np.zeros((n + 1, kmax + 1))
    for k, pk in zip(sizes.tolist(), probs.tolist()):
        j = np.arange(k + 1)
        P[:, :k + 1] += pk * _hypergeom(n, n - c, k, j)
    P[n, :] = 0.0
    P[n, 0] = 1.0

    # exact expectation by back substitution from c = n
    E = np.zeros(n + 1)
    for cc in range(n - 1, -1, -1):
        stay = P[cc, 0]
        if stay >= 1.0:
            E[cc] = math.inf
            continue
        jmax = min(kmax, n - cc)
        E[cc] = (1.0 + math.fsum((P[cc, 1:jmax + 1] * E[cc + 1:cc + jmax + 1]).tolist())) / (1.0 - stay)
    expected = float(E[0])

    state = np.zeros(n + 1)
    state[0] = 1.0
    pmf = [0.0]
    if n == 0:
        return ExactDistribution(np.array([1.0]), 0.0, 0.0)
    cap = t_max if t_max is not None else 10 ** 7
    t = 0
    tail = 1.0
    lo, hi = 0, 1  # state is zero outside [lo, hi)
    while t < cap:
        t += 1
        top = min(hi + kmax, n + 1)
        new = np.zeros(n + 1)
        new[lo:hi] = state[lo:hi] * P[lo:hi, 0]
        for j in range(1, kmax + 1):
            if lo + j > n:
                break
            e = min(hi, n + 1 - j)
            new[lo + j:e + j] += state[lo:e] * P[lo:e, j]
        pmf.append(float(new[n]))
        new[n] = 0.0
        # mass below 1e-300 cannot affect any reported digit
        new[new < 1e-300] = 0.0
        nz = np.flatnonzero(new[lo:top])
        if nz.size:
            lo, hi = lo + int(nz[0]), lo + int(nz[-1]) + 1
        state = new
        tail = float(state[lo:hi].sum())
        if not nz.size:
            break
        if t_max is None and tail <= tail_tol:
            break
    return ExactDistribution(np.array(pmf), math.fsum(state.tolist()), expected)


def exchangeable_exact_model(model: M.CouponModel, t_max: int | None = None) -> ExactDistribution:
    if not model.exchangeable:
        raise TypeError("model is not exchangeable")
    return exchangeable_exact(model.n, model.size_law(), t_max)
