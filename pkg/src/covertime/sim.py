"""Monte Carlo covering runs.

Coupons are drawn in batches and folded into a ``first_hit`` array by the
``absorb`` kernel, so a run costs one kernel call per batch. Batch sizes
depend only on the model and the number of draws so far. A run therefore
consumes the same random numbers whichever kernel backend is active.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analytic import elementary_bounds
from .intensity import profile as make_profile
from .intensity import wilson_interval
from .model import CouponModel
from .streams import ALDOUS_INNER, ALDOUS_OUTER, HALF_TIME, POISSON, REPLICATE, stream

QUANTILE_LEVELS = (1, 5, 25, 50, 75, 95, 99)
BATCH_MEMBERS = 1 << 21  # cap on coupon members materialized per batch


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("COVERTIME_THREADS", "1")))
    except ValueError:
        return 1


def default_cap(model: CouponModel) -> int:
    """``100 n log n / mu`` draws (at least 100)."""
    n = model.n
    mu = model.mean_size
    if mu <= 0:
        return 1000
    return max(100, math.ceil(100 * n * max(math.log(n), 1.0) / mu))


def pmap(fn, items, threads: int | None = None) -> list:
    """Ordered map; results come back in input order for any thread count."""
    threads = default_threads() if threads is None else max(1, int(threads))
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


@dataclass
class CoverTrace:
    T: float
    degrees: np.ndarray | None
    holdout: np.ndarray
    uncovered_counts: list = field(default_factory=list)
    first_hit: np.ndarray | None = field(default=None, repr=False)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.T)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "uncovered"])
            for t, u in self.uncovered_counts:
                w.writerow([t, u])


def _batch_size(t0: int, mean_size: float, cap: int) -> int:
    b = max(32, t0 // 2)
    b = min(b, max(1, int(BATCH_MEMBERS / max(mean_size, 1.0))))
    return max(1, min(b, cap - t0))


def _run(model: CouponModel, rng: np.random.Generator, cap: int, targets=None,
         track_degrees: bool = True, checkpoints=()) -> CoverTrace:
    n = model.n
    first_hit = np.zeros(n, dtype=np.int64)
    if targets is not None:
        first_hit[:] = -1
        first_hit[np.asarray(targets, dtype=np.int64)] = 0
    remaining = int(np.count_nonzero(first_hit == 0))
    degrees = np.zeros(n if track_degrees else 0, dtype=np.uint32)
    mean_size = model.mean_size
    t0 = 0
    T = math.inf
    while remaining > 0 and t0 < cap:
        size = _batch_size(t0, mean_size, cap)
        b = model.draw_batch(rng, size)
        remaining, stop = _kernels.absorb(first_hit, degrees, b.members, b.offsets, b.full, t0, remaining)
        if stop >= 0:
            T = t0 + stop + 1
            break
        t0 += size
    if remaining == 0 and not math.isfinite(T):
        T = 0  # nothing to cover
    hit = first_hit.copy()
    if targets is not None:
        hit[first_hit < 0] = 0
        tmask = first_hit != -1
    else:
        tmask = np.ones(n, dtype=bool)
    if math.isfinite(T):
        holdout = np.flatnonzero(tmask & (first_hit == T)) if T > 0 else np.zeros(0, np.int64)
    else:
        holdout = np.flatnonzero(tmask & (first_hit == 0))
    counts = []
    if len(checkpoints):
        times = np.sort(first_hit[tmask & (first_hit > 0)])
        total = int(np.count_nonzero(tmask))
        for t in checkpoints:
            counts.append((int(t), total - int(np.searchsorted(times, t, side="right"))))
    return CoverTrace(float(T), degrees if track_degrees else None, holdout, counts, hit)


def run_once(model: CouponModel, seed: int = 0, checkpoints=(), cap: int | None = None,
             targets=None, track_degrees: bool = True) -> CoverTrace:
    """Draw coupons until everything (or every target) is covered.

    ``T`` is ``inf`` when ``cap`` draws do not suffice; the holdout is then
    the set of elements never covered.
    """
    cap = default_cap(model) if cap is None else int(cap)
    return _run(model, stream(seed, REPLICATE, 0), cap, targets, track_degrees, checkpoints)


def replicate_stream(master_seed: int, r: int) -> np.random.Generator:
    return stream(master_seed, REPLICATE, r)


@dataclass
class RunSummary:
    samples: np.ndarray
    censored: int
    seed: int
    replicates: int
    cap: int
    all_samples: np.ndarray = field(default=None, repr=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples)) if self.samples.size else math.nan

    @property
    def variance(self) -> float:
        return float(np.var(self.samples, ddof=1)) if self.samples.size > 1 else 0.0

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.samples.size) if self.samples.size > 1 else math.nan

    @property
    def quantiles(self) -> dict:
        if not self.samples.size:
            return {}
        qs = np.quantile(self.samples, [p / 100 for p in QUANTILE_LEVELS])
        return {str(p): float(v) for p, v in zip(QUANTILE_LEVELS, qs)}

    @property
    def median(self) -> float:
        return float(np.median(self.samples))

    def empirical_tail(self, c):
        """Fraction of all replicates with ``T > c`` (censored runs count as beyond)."""
        c = np.asarray(c, dtype=float)
        s = np.sort(self.samples)
        beyond = self.samples.size - np.searchsorted(s, c, side="right") + self.censored
        out = beyond / self.replicates
        return float(out) if out.ndim == 0 else out

    def fraction_below(self, c) -> float:
        """Fraction of all replicates with ``T < c``."""
        return float(np.count_nonzero(self.samples < c) / self.replicates)

    def pmf(self, t_max: int | None = None) -> np.ndarray:
        s = self.samples.astype(np.int64)
        t_max = int(s.max()) if t_max is None else t_max
        return np.bincount(np.minimum(s, t_max), minlength=t_max + 1) / self.replicates

    def to_dict(self, include_samples: bool = False) -> dict:
        out = {"replicates": self.replicates, "seed": self.seed, "censored": self.censored,
               "cap": self.cap, "mean": self.mean, "variance": self.variance,
               "min": float(self.samples.min()) if self.samples.size else None,
               "max": float(self.samples.max()) if self.samples.size else None,
               "quantiles": self.quantiles}
        if include_samples:
            out["samples"] = self.samples.tolist()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["replicate", "T"])
            for i, t in enumerate(self.all_samples.tolist()):
                w.writerow([i, "inf" if math.isinf(t) else int(t)])


def summarize(values, seed: int, cap: int) -> RunSummary:
    vals = np.asarray(values, dtype=float)
    fin = vals[np.isfinite(vals)]
    return RunSummary(fin, int(vals.size - fin.size), int(seed), int(vals.size), int(cap), vals)


def sample_times(model: CouponModel, replicates: int, master_seed: int = 0,
                 threads: int | None = None, cap: int | None = None) -> RunSummary:
    """Covering times of ``replicates`` independent runs; replicate ``r`` uses its own stream."""
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    cap = default_cap(model) if cap is None else int(cap)

    def one(r):
        return _run(model, stream(master_seed, REPLICATE, r), cap, None, False).T

    return summarize(pmap(one, range(replicates), threads), master_seed, cap)


@dataclass
class HalfTimeResult:
    t_half: int
    bracket: tuple[int, int]
    trace: list  # (t, p_hat, trials)
    resolved: bool

    def to_dict(self) -> dict:
        return {"t_half": self.t_half, "bracket": list(self.bracket), "resolved": self.resolved,
                "trace": [list(x) for x in self.trace]}


def cover_probability(model: CouponModel, t: int, trials: int, seed: int = 0, chunk: int = 50,
                      threads: int | None = None, early_stop: bool = True):
    """Estimate ``P(C_t = V)`` with sequential Wilson-interval stopping.

    Returns ``(successes, trials_used)``.
    """
    succ = used = 0
    while used < trials:
        m = min(chunk, trials - used)

        def one(i, base=used):
            return _run(model, stream(seed, HALF_TIME, t, base + i), t, None, False).finite

        succ += sum(pmap(one, range(m), threads))
        used += m
        if early_stop:
            lo, hi = wilson_interval(succ, used)
            if lo > 0.5 or hi < 0.5:
                break
    return succ, used


def empirical_half_time(model: CouponModel, trials_per_t: int = 2000, tolerance: float = 0.01,
                        seed: int = 0, threads: int | None = None) -> HalfTimeResult:
    """Least integer ``t`` whose estimated ``P(C_t = V)`` is at least 1/2.

    Bisection relies on ``P(C_t = V)`` being nondecreasing in ``t``. The
    starting bracket comes from the union bound, which guarantees
    ``P(C_t = V) >= 1/2`` at its upper end. When the estimates on both
    sides of the answer lie within ``tolerance`` of 1/2 the result is
    flagged as unresolved and the bracket should be reported instead.
    """
    prof = make_profile(model)
    hi = max(1, math.ceil(elementary_bounds(prof).t_half_hi))
    lo = 0
    trace = []
    est = {}

    def p_at(t):
        if t not in est:
            s, m = cover_probability(model, t, trials_per_t, seed, threads=threads)
            est[t] = s / m
            trace.append((t, s / m, m))
        return est[t]

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if p_at(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    p_hi = est.get(hi, 1.0)
    p_lo = est.get(lo, 0.0)
    resolved = not (abs(p_hi - 0.5) <= tolerance and abs(p_lo - 0.5) <= tolerance)
    return HalfTimeResult(hi, (lo, hi), trace, resolved)


@dataclass
class PoissonEstimate:
    mean: float
    ci: float
    replicates: int


def poissonized_uncovered(model: CouponModel, t: float, replicates: int = 1000, seed: int = 0,
                          threads: int | None = None) -> PoissonEstimate:
    """Mean number of uncovered elements after ``Poisson(t)`` coupons, with a 99% CI."""
    if t < 0:
        raise ValueError("t must be non-negative")
    n = model.n

    def one(r):
        rng = stream(seed, POISSON, r)
        k = int(rng.poisson(t))
        covered = np.zeros(n, dtype=bool)
        done = 0
        while done < k:
            size = min(k - done, max(1, int(BATCH_MEMBERS / max(model.mean_size, 1.0))))
            b = model.draw_batch(rng, size)
            if b.full.any():
                return 0
            covered[b.members] = True
            done += size
        return n - int(np.count_nonzero(covered))

    vals = np.array(pmap(one, range(replicates), threads), dtype=float)
    ci = 2.5758 * vals.std(ddof=1) / math.sqrt(replicates) if replicates > 1 else math.inf
    return PoissonEstimate(float(vals.mean()), float(ci), replicates)


@dataclass
class AldousEstimate:
    ratio: float
    ci: float
    mean_T: float
    mean_tau: float
    censored_inner: int
    outer_reps: int
    inner_reps: int


def aldous_ratio(model: CouponModel, outer_reps: int = 50, inner_reps: int = 20, seed: int = 0,
                 threads: int | None = None, cap: int | None = None) -> AldousEstimate:
    """Estimate ``E_B(E tau_B) / E T`` where ``B`` is the holdout set of a run."""
    cap = default_cap(model) if cap is None else int(cap)

    def outer(i):
        tr = _run(model, stream(seed, ALDOUS_OUTER, i), cap, None, False)
        taus = [_run(model, stream(seed, ALDOUS_INNER, i, j), cap, tr.holdout, False).T
                for j in range(inner_reps)]
        return tr.T, taus

    res = pmap(outer, range(outer_reps), threads)
    Ts = np.array([r[0] for r in res])
    tau = np.array([r[1] for r in res], dtype=float)
    censored = int(np.count_nonzero(~np.isfinite(tau)))
    tau_means = np.array([row[np.isfinite(row)].mean() if np.isfinite(row).any() else np.nan for row in tau])
    Ts = Ts[np.isfinite(Ts)]
    num, den = float(np.nanmean(tau_means)), float(Ts.mean())
    ratio = num / den
    # delta-method standard error for the ratio of two means
    se_num = np.nanstd(tau_means, ddof=1) / math.sqrt(max(1, np.isfinite(tau_means).sum()))
    se_den = Ts.std(ddof=1) / math.sqrt(Ts.size) if Ts.size > 1 else 0.0
    se = ratio * math.sqrt((se_num / num) ** 2 + (se_den / den) ** 2) if num > 0 else 0.0
    return AldousEstimate(ratio, float(2.5758 * se), den, num, censored, outer_reps, inner_reps)
