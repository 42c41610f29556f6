"""Intensity profiles ``q_x`` and pair intensities ``q_xy`` of a coupon model."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .model import CouponModel, ModelError, NotClosedForm
from .streams import ESTIMATE, stream

DENSE_MAX_N = 4096
Z99 = 2.5758293035489004  # two-sided 99% normal quantile


class SizeCapError(ModelError):
    """A dense structure was requested above its memory cap."""


def wilson_interval(k, N, z: float = Z99):
    """Wilson score interval for ``k`` successes in ``N`` trials (array-friendly)."""
    k = np.asarray(k, dtype=float)
    p = k / N
    denom = 1 + z * z / N
    centre = (p + z * z / (2 * N)) / denom
    half = z * np.sqrt(p * (1 - p) / N + z * z / (4 * N * N)) / denom
    return centre - half, centre + half


def holder_mean(q, alpha: float, weights=None) -> float:
    """Power mean ``((1/n) sum q_x^alpha)^(1/alpha)``; ``alpha = 0`` is the geometric mean.

    ``weights`` (counts per entry) lets a profile pass its distinct levels
    instead of the full vector.
    """
    q = np.asarray(q, dtype=float).ravel()
    w = np.ones_like(q) if weights is None else np.asarray(weights, dtype=float).ravel()
    if np.any(q < 0):
        raise ValueError("holder_mean needs non-negative entries")
    if alpha <= 0 and np.any(q[w > 0] == 0):
        raise ValueError("holder_mean with alpha <= 0 is undefined for a zero entry")
    keep = w > 0
    q, w = q[keep], w[keep]
    logw = np.log(w) - math.log(w.sum())
    with np.errstate(divide="ignore"):
        lq = np.log(q)
    if alpha > 0 and np.any(q == 0):
        lq = np.where(q == 0, -np.inf, lq)
    elif np.all(np.isfinite(lq)):
        # centre the logs; near alpha = 0 use the cumulant series, since
        # dividing a log-sum-exp by a tiny alpha amplifies rounding
        p = w / w.sum()
        m = float(np.dot(p, lq))
        lc = lq - m
        spread = float(np.max(np.abs(lc)))
        if abs(alpha) * spread < 1e-3:
            k2 = float(np.dot(p, lc ** 2))
            k3 = float(np.dot(p, lc ** 3))
            return float(np.exp(m + alpha * k2 / 2 + alpha * alpha * k3 / 6))
        return float(np.exp(m + logsumexp(alpha * lc + logw) / alpha))
    return float(np.exp(logsumexp(alpha * lq + logw) / alpha))


def alpha_grid(n: int) -> list[int]:
    """``{0, 1, 2, 4, ..., 2^ceil(log2 log n)}``."""
    top = math.ceil(math.log2(math.log(n))) if n > 2 else 0
    return [0] + [2 ** i for i in range(max(top, 0) + 1)]


@dataclass(frozen=True, eq=False)
class IntensityProfile:
    """The intensity vector of a model with its size moments.

    ``levels`` holds the distinct values of ``q`` with their multiplicities,
    so sums over elements cost O(#levels). ``ci`` is the per-element
    confidence radius when ``estimated``.
    """

    q: np.ndarray
    mu: float
    M: float
    chi: float
    estimated: bool = False
    ci: np.ndarray | None = None
    exchangeable: bool = False
    transitive: bool = False
    kind: str = ""
    levels: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.levels is None:
            vals, counts = np.unique(np.asarray(self.q), return_counts=True)
            object.__setattr__(self, "levels", (vals, counts.astype(float)))
        v = self.levels[0]
        if np.any(v < -1e-15) or np.any(v > 1 + 1e-12):
            raise ModelError("intensities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return int(self.q.shape[0])

    @property
    def q_star(self) -> float:
        return float(self.levels[0].min())

    @property
    def q_max(self) -> float:
        return float(self.levels[0].max())

    @property
    def balanced(self) -> bool:
        v = self.levels[0]
        return bool(v.max() - v.min() <= 1e-9 * max(v.max(), 1e-300))

    def holder(self, alpha: float) -> float:
        return holder_mean(self.levels[0], alpha, self.levels[1])

    def with_q(self, q) -> IntensityProfile:
        """Copy with a shifted intensity vector (used to probe CI edges)."""
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
        return IntensityProfile(q, float(q.sum()), self.M, self.chi, False, None,
                                self.exchangeable, self.transitive, self.kind)

    def summary(self) -> dict:
        grid = alpha_grid(max(self.n, 3))
        hm = {}
        for a in sorted(set(grid) | {-a for a in grid}):
            try:
                hm[str(a)] = self.holder(a)
            except ValueError:
                hm[str(a)] = None
        return {"n": self.n, "mu": self.mu, "M": self.M, "chi": self.chi,
                "q_star": self.q_star, "q_max": self.q_max, "balanced": self.balanced,
                "estimated": self.estimated,
                "ci_radius": None if self.ci is None else float(np.max(self.ci)),
                "holder_means": hm}

    def to_json(self, path=None) -> str:
        text = json.dumps(self.summary(), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["element", "q"])
            for x, v in enumerate(np.asarray(self.q).tolist()):
                w.writerow([x, repr(v)])


def _size_moments(model: CouponModel, draws: int, seed: int):
    law = model.size_law()
    if law is not None:
        s, p = np.asarray(law[0], float), np.asarray(law[1], float)
        return float(np.dot(s, p)), float(s[p > 0].max()), float(np.dot(s * s, p))
    rng = stream(seed, ESTIMATE, 1)
    b = model.draw_batch(rng, draws)
    sizes = np.where(b.full.astype(bool), model.n, np.diff(b.offsets)).astype(float)
    return float(sizes.mean()), float(sizes.max()), float(np.mean(sizes ** 2))


def profile(model: CouponModel, draws: int = 100_000, seed: int = 0) -> IntensityProfile:
    """Intensity profile of ``model``; exact where a closed form exists."""
    mu, M, chi = _size_moments(model, draws, seed)
    kw = dict(exchangeable=model.exchangeable, transitive=model.transitive, kind=model.kind)
    if model.balanced and model.kind not in ("spanning_tree", "explicit", "graph_neighborhood"):
        q0 = model.element_prob(0)
        q = np.broadcast_to(np.float64(q0), (model.n,))
        return IntensityProfile(q, mu, M, chi, levels=(np.array([q0]), np.array([float(model.n)])), **kw)
    estimated = getattr(model, "method", "exact") == "sample"
    q = np.asarray(model.element_probs(), dtype=float)
    ci = None
    if estimated:
        N = model.estimate_draws
        lo, hi = wilson_interval(q * N, N)
        ci = np.maximum(q - lo, hi - q)
    return IntensityProfile(q, float(np.sum(q)) if not estimated else mu, M, chi, estimated, ci, **kw)


@dataclass(frozen=True, eq=False)
class PairIntensities:
    """Pair intensities in one of three modes.

    ``dense``: full matrix with ``q_xx = q_x`` on the diagonal.
    ``callback``: exact ``value(x, y)`` plus, when available, a per-element
    spectrum ``[(q_xy, count), ...]`` for fast pair sums.
    ``estimated``: dense co-occurrence frequencies with per-entry
    confidence radii ``ci``; ``ci_radius`` is their maximum.
    """

    mode: str
    n: int
    matrix: np.ndarray | None = None
    callback: Callable | None = None
    spectrum: list | None = None
    ci: np.ndarray | None = None
    q: np.ndarray | None = None

    @property
    def ci_radius(self) -> float:
        return 0.0 if self.ci is None else float(np.max(self.ci))

    def value(self, x: int, y: int) -> float:
        if self.matrix is not None:
            return float(self.matrix[x, y])
        if x == y:
            return float(self.q[x])
        return float(self.callback(x, y))

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if self.n > DENSE_MAX_N:
            raise SizeCapError(f"dense pair matrix refused for n={self.n} > {DENSE_MAX_N}")
        m = np.empty((self.n, self.n))
        for x in range(self.n):
            m[x, x] = self.q[x]
            for y in range(x + 1, self.n):
                m[x, y] = m[y, x] = self.callback(x, y)
        return m

    def off_diagonal(self):
        """``(values, weights)`` of ``q_xy`` over ordered pairs ``x != y``."""
        if self.spectrum is not None:
            v = np.array([s[0] for s in self.spectrum], dtype=float)
            c = np.array([s[1] for s in self.spectrum], dtype=float) * self.n
            return v, c
        m = self.dense()
        mask = ~np.eye(self.n, dtype=bool)
        return m[mask], np.ones(self.n * (self.n - 1))

    def upper(self) -> PairIntensities:
        """Upper confidence version (identity for exact modes)."""
        if self.ci is None:
            return self
        m = np.minimum(self.matrix + self.ci, 1.0)
        return PairIntensities("estimated", self.n, m, None, None, None, self.q)

    def lower(self) -> PairIntensities:
        if self.ci is None:
            return self
        m = np.maximum(self.matrix - self.ci, 0.0)
        return PairIntensities("estimated", self.n, m, None, None, None, self.q)

    def to_json(self) -> dict:
        out = {"mode": self.mode, "n": self.n, "ci_radius": self.ci_radius}
        if self.spectrum is not None:
            out["spectrum"] = [[float(v), int(c)] for v, c in self.spectrum]
        elif self.matrix is not None and self.n <= 64:
            out["matrix"] = self.matrix.tolist()
        return out


def pair_intensities(model: CouponModel, budget: int = 100_000, seed: int = 0,
                     dense: bool | None = None) -> PairIntensities:
    """Pair intensities of ``model``: exact when closed forms exist, else co-occurrence counts."""
    n = model.n
    q = np.asarray(model.element_probs(), dtype=float)
    spectrum = model.pair_spectrum()
    want_dense = n <= DENSE_MAX_N if dense is None else dense
    if want_dense and n > DENSE_MAX_N:
        raise SizeCapError(f"dense pair matrix refused for n={n} > {DENSE_MAX_N}")
    try:
        if want_dense:
            return PairIntensities("dense", n, model.pair_matrix(), model.pair_prob, spectrum, None, q)
        if n > 1:
            model.pair_prob(0, 1)
        return PairIntensities("callback", n, None, model.pair_prob, spectrum, None, q)
    except NotClosedForm:
        pass
    if n > DENSE_MAX_N:
        raise SizeCapError(f"pair estimation needs a dense counter; n={n} > {DENSE_MAX_N}")
    rng = stream(seed, ESTIMATE, 2)
    counts = np.zeros((n, n))
    done = 0
    while done < budget:
        size = min(1024, budget - done)
        b = model.draw_batch(rng, size)
        inc = np.zeros((size, n))
        rows = np.repeat(np.arange(size), np.diff(b.offsets))
        inc[rows, b.members] = 1.0
        inc[b.full.astype(bool)] = 1.0
        counts += inc.T @ inc
        done += size
    est = counts / budget
    lo, hi = wilson_interval(counts, budget)
    ci = np.maximum(est - lo, hi - est)
    return PairIntensities("estimated", n, est, None, None, ci, np.diag(est).copy())
