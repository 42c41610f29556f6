"""Closed-form bounds, the moment function ``f(t) = log E Z_t``, and condition checkers.

Asymptotic hypotheses are replaced by explicit finite-n surrogates, which
every report states next to its verdict:

* ``omega`` (a quantity tending to infinity slowly) defaults to
  ``log log n``;
* ``a = o(b)`` is read as ``a <= b / omega`` and ``a >> b`` as
  ``a >= omega * b``;
* ``<< 1`` in the bounded-correlation product is read as ``<= 0.1``.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .intensity import (DENSE_MAX_N, IntensityProfile, PairIntensities, SizeCapError,
                        alpha_grid, holder_mean)
from .model import CouponModel

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


def default_omega(n: int) -> float:
    """``log log n``, floored at 1 so tiny instances stay meaningful."""
    return max(math.log(math.log(n)), 1.0) if n > 2 else 1.0


class InfiniteTime(ArithmeticError):
    """Some element has zero intensity, so coverage never completes."""


# ---------------------------------------------------------------------------
# moment function


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """``E Z_t``, ``E Z_t^2`` and ``f = log E Z_t`` for a profile."""

    profile: IntensityProfile
    pairs: PairIntensities | None = None

    @property
    def n(self) -> int:
        return self.profile.n

    def _logterms(self, t: float):
        v, c = self.profile.levels
        with np.errstate(divide="ignore"):
            return np.log(c) - v * t, v

    def expected_uncovered(self, t: float) -> float:
        if t < 0:
            raise ValueError("t must be non-negative")
        lt, _ = self._logterms(t)
        # per-term log-domain evaluation; fsum keeps the sum compensated
        return math.fsum(np.exp(lt).tolist())

    def f(self, t: float) -> float:
        lt, _ = self._logterms(t)
        return float(logsumexp(lt))

    def derivatives(self, t: float):
        """``(f, f', f'')``.

        ``-f'`` is the mean intensity of an uncovered element and ``f''``
        is its variance. Written over pairs this is
        ``sum_{x,y} (q_x - q_y)^2 e^{-(q_x+q_y)t} / (2 (E Z_t)^2)``.
        """
        if t < 0:
            raise ValueError("t must be non-negative")
        lt, v = self._logterms(t)
        f = float(logsumexp(lt))
        w = np.exp(lt - f)
        mean = float(np.dot(w, v))
        var = float(np.dot(w, (v - mean) ** 2))
        return f, -mean, var

    def second_moment(self, t: float) -> float:
        """``E Z_t^2 = sum_{x,y} exp(-(q_x + q_y - q_xy) t)``, diagonal ``q_xx = q_x``."""
        if self.pairs is None:
            raise ValueError("second moment needs pair intensities")
        if t < 0:
            raise ValueError("t must be non-negative")
        prof, pairs = self.profile, self.pairs
        n = self.n
        if prof.balanced and pairs.spectrum is not None:
            q = prof.q_star
            terms = [n * math.exp(-q * t)]
            terms += [n * c * math.exp(-(2 * q - v) * t) for v, c in pairs.spectrum]
            return math.fsum(terms)
        if n > DENSE_MAX_N:
            raise SizeCapError("dense second moment refused above the size cap; use sampled_second_moment")
        Q = pairs.dense()
        q = np.asarray(prof.q, dtype=float)
        rows = []
        for x in range(n):
            e = -(q[x] + q - Q[x]) * t
            e[x] = -q[x] * t
            rows.append(math.fsum(np.exp(e).tolist()))
        return math.fsum(rows)

    def sampled_second_moment(self, t: float, samples: int = 100_000, seed: int = 0):
        """Uniform ordered-pair estimate of ``E Z_t^2``; returns ``(value, ci99)``."""
        from .streams import ESTIMATE, stream

        rng = stream(seed, ESTIMATE, 3)
        n = self.n
        xs = rng.integers(0, n, samples)
        ys = rng.integers(0, n, samples)
        q = self.profile.q
        qxy = np.array([q[x] if x == y else self.pairs.value(int(x), int(y)) for x, y in zip(xs, ys)])
        vals = np.exp(-(q[xs] + q[ys] - qxy) * t) * float(n) ** 2
        return float(vals.mean()), float(2.5758 * vals.std(ddof=1) / math.sqrt(samples))

    def to_csv(self, path, ts) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "EZ", "f", "f1", "f2"])
            for t in ts:
                f, f1, f2 = self.derivatives(float(t))
                w.writerow([repr(float(t)), repr(self.expected_uncovered(float(t))), repr(f), repr(f1), repr(f2)])


def expected_uncovered(curve: MomentCurve, t: float) -> float:
    return curve.expected_uncovered(t)


def second_moment(curve: MomentCurve, t: float) -> float:
    return curve.second_moment(t)


def f_and_derivatives(curve: MomentCurve, t: float):
    return curve.derivatives(t)


def _bisect(fn: Callable[[float], float], lo: float, hi: float, rtol: float = 1e-10) -> float:
    """Root of a decreasing ``fn`` on ``[lo, hi]`` with ``fn(lo) >= 0 >= fn(hi)``."""
    while hi - lo > rtol * max(abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_star(curve: MomentCurve) -> float:
    """The time at which ``E Z_t = 1``; ``inf`` when some ``q_x = 0``."""
    prof = curve.profile
    n, qs = prof.n, prof.q_star
    if qs <= 0:
        return math.inf
    if n == 1:
        return 0.0
    if prof.balanced:
        return math.log(n) / qs
    return _bisect(curve.f, 0.0, 2 * math.log(n) / qs)


def time_for_level(curve: MomentCurve, level: float) -> float:
    """The time at which ``E Z_t = level`` (``0`` if ``level >= n``)."""
    prof = curve.profile
    if level >= prof.n:
        return 0.0
    if prof.q_star <= 0:
        return math.inf
    lg = math.log(level)
    hi = 2 * (math.log(prof.n) + max(-lg, 0.0) + 1.0) / prof.q_star
    return _bisect(lambda t: curve.f(t) - lg, 0.0, hi)


# ---------------------------------------------------------------------------
# closed-form bounds


@dataclass(frozen=True)
class ElementaryBounds:
    t_half_lo: float
    t_half_hi: float
    whp_upper: float
    failure_prob: float
    epsilon: float


def elementary_bounds(profile: IntensityProfile, epsilon: float = 0.05) -> ElementaryBounds:
    """Union-bound limits on ``T_1/2`` and a whp upper bound on ``T``."""
    n, qs = profile.n, profile.q_star
    if qs <= 0:
        raise InfiniteTime("q_star = 0: some element is never covered")
    fail = float(n) ** -epsilon
    if qs >= 1:
        return ElementaryBounds(1.0, 1.0, 1.0, fail, epsilon)
    rate = -math.log1p(-qs)
    return ElementaryBounds(math.log(2) / rate, math.log(2 * n) / rate,
                            (1 + epsilon) * math.log(n) / rate, fail, epsilon)


@dataclass(frozen=True)
class LotteryLaw:
    c: float
    t_half: float
    expected_T: float
    tail: Callable[[float], float]


def lottery_analytics(n: int, p: float) -> LotteryLaw:
    """Limits for the lottery collector: ``T`` is roughly exponential with mean ``n/c``."""
    c = p * n
    if c <= 0:
        raise InfiniteTime("lottery with c = 0 reduces to the single-coupon collector")
    if c < 0.1 or c > n / math.log(max(n, 3)):
        warnings.warn(f"c = {c:g} lies outside the regime where the lottery law applies", stacklevel=2)
    return LotteryLaw(c, n * math.log(2) / c, n / c, lambda x: math.exp(-x))


def gumbel_law(n: int, k: int, x: float) -> float:
    """Limit of ``P(|T - n log n / k| > x n / k)`` for the k-uniform collector."""
    if k > n / math.log(max(n, 3)):
        warnings.warn("the two-sided tail law needs k small compared with n", stacklevel=2)
    return math.exp(-x)


def erdos_renyi_cdf(x: float) -> float:
    """Limit of ``P(T < n log n + x n)`` for the single-coupon collector."""
    return math.exp(-math.exp(-x))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ThresholdWindow:
    t_minus: float
    t_plus: float
    t_star: float
    method: str


@dataclass
class ClauseResult:
    id: str
    verdict: str
    margin: float | None
    surrogate: str
    witness: dict = field(default_factory=dict)


@dataclass
class ConditionReport:
    theorem: str
    clauses: list[ClauseResult]
    window: ThresholdWindow | None = None
    claims: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def clause(self, cid: str) -> ClauseResult:
        for c in self.clauses:
            if c.id == cid or c.id.endswith("." + cid):
                return c
        raise KeyError(cid)

    def verdict(self, cid: str) -> str:
        return self.clause(cid).verdict

    @property
    def any_holds(self) -> bool:
        return any(c.verdict == HOLDS for c in self.clauses)

    @property
    def all_hold(self) -> bool:
        return all(c.verdict == HOLDS for c in self.clauses)

    def to_dict(self) -> dict:
        return {"theorem": self.theorem,
                "clauses": [_clean(asdict(c)) for c in self.clauses],
                "window": None if self.window is None else _clean(asdict(self.window)),
                "claims": _clean(self.claims),
                "parameters": _clean(self.parameters)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _verdict(ok: bool) -> str:
    return HOLDS if ok else FAILS


def _merge(results: list[list[ClauseResult]]) -> list[ClauseResult]:
    """Combine evaluations at the point estimate and at CI edges.

    A clause whose verdict differs between the evaluations is inconclusive.
    """
    base = results[0]
    out = []
    for i, c in enumerate(base):
        verdicts = {r[i].verdict for r in results}
        if len(verdicts) > 1:
            c = ClauseResult(c.id, INCONCLUSIVE, c.margin, c.surrogate,
                             dict(c.witness, ci_verdicts=sorted(verdicts)))
        out.append(c)
    return out


def _profile_variants(profile: IntensityProfile) -> list[IntensityProfile]:
    if not profile.estimated or profile.ci is None:
        return [profile]
    q = np.asarray(profile.q)
    return [profile, profile.with_q(q - profile.ci), profile.with_q(q + profile.ci)]


# ---------------------------------------------------------------------------
# first moment window


def _first_moment_clauses(profile: IntensityProfile, omega: float):
    n = profile.n
    qs = profile.q_star
    logn = math.log(n) if n > 1 else 0.0
    curve = MomentCurve(profile)

    t_i = time_for_level(curve, omega)
    lhs = t_i * qs
    c1 = ClauseResult("thm_first_moment.i", _verdict(lhs >= omega), lhs - omega,
                      "t with E Z_t = omega satisfies t*q_star >= omega",
                      {"t": t_i, "t_q_star": lhs, "omega": omega})

    best = None
    for a in alpha_grid(max(n, 3)):
        if a > logn / omega:
            continue
        try:
            hm = profile.holder(-a)
        except ValueError:
            continue
        margin = logn * qs - (a + 2) * hm
        if best is None or margin > best[1]:
            best = (a, margin, hm)
    if best is None:
        c2 = ClauseResult("thm_first_moment.ii", FAILS, None, "alpha <= log n / omega on the alpha grid", {})
    else:
        a, margin, hm = best
        c2 = ClauseResult("thm_first_moment.ii", _verdict(margin >= 0), margin,
                          "(alpha+2)*holder(q,-alpha) <= log(n)*q_star, alpha <= log n / omega",
                          {"alpha": a, "holder_mean": hm, "rhs": logn * qs})

    vals, counts = profile.levels
    cum = np.cumsum(counts)
    stat, r_best = -math.inf, None
    for r in [1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0]:
        cnt = float(cum[np.searchsorted(vals, r * qs, side="left") - 1]) if np.any(vals < r * qs) else 0.0
        s = math.log(cnt) / r if cnt > 0 else -math.inf
        if s > stat:
            stat, r_best = s, r
    c3 = ClauseResult("thm_first_moment.iii", _verdict(stat >= omega ** 2),
                      stat - omega ** 2 if math.isfinite(stat) else None,
                      "max over r of log #{y: q_y < r q_star} / r >= omega^2",
                      {"r": r_best, "statistic": stat})
    return [c1, c2, c3]


def first_moment_window(profile: IntensityProfile, omega: float | None = None) -> ConditionReport:
    """Sharp-threshold conditions for ``E Z_t`` and the window around ``T*``.

    The window ``T^- = T* - D``, ``T^+ = T* + D`` with ``D = T* / log n``
    always brackets ``E Z = 1`` by monotonicity. ``window.method`` names the
    first clause that holds, or ``"none"``.
    """
    n = profile.n
    omega = default_omega(n) if omega is None else omega
    if profile.q_star <= 0:
        raise InfiniteTime("q_star = 0: some element is never covered")
    clauses = _merge([_first_moment_clauses(p, omega) for p in _profile_variants(profile)])
    curve = MomentCurve(profile)
    ts = t_star(curve)
    delta = ts / max(math.log(n), 1.0)
    method = next((c.id for c in clauses if c.verdict == HOLDS), "none")
    win = ThresholdWindow(max(ts - delta, 0.0), ts + delta, ts, method)
    claims = {"EZ_t_minus": curve.expected_uncovered(win.t_minus),
              "EZ_t_plus": curve.expected_uncovered(win.t_plus),
              "delta": delta}
    return ConditionReport("thm_first_moment", clauses, win, claims, {"omega": omega})


# ---------------------------------------------------------------------------
# bounded correlation


def _max_ratio(profile: IntensityProfile, pairs: PairIntensities) -> float:
    if pairs.spectrum is not None and profile.balanced:
        q = profile.q_star
        return max((v for v, _ in pairs.spectrum), default=0.0) / (q * q)
    Q = pairs.dense()
    q = np.asarray(profile.q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = Q / np.outer(q, q)
    np.fill_diagonal(R, -np.inf)
    R = np.where(np.isnan(R), -np.inf, R)
    return float(R.max()) if profile.n > 1 else 0.0


def bounded_correlation_check(profile: IntensityProfile, pairs: PairIntensities,
                              window: ThresholdWindow | None = None,
                              omega: float | None = None, threshold: float = 0.1) -> ConditionReport:
    """Whp window ``T^- <= T <= T^+`` when correlations are bounded by ``C``."""
    n = profile.n
    omega = default_omega(n) if omega is None else omega
    if window is None:
        window = first_moment_window(profile, omega).window
    logn = math.log(n)

    def evaluate(prof, prs):
        curve = MomentCurve(prof)
        ez_m = curve.expected_uncovered(window.t_minus)
        ez_p = curve.expected_uncovered(window.t_plus)
        c1 = ClauseResult("thm_bounded_correlation.i", _verdict(ez_m >= omega and ez_p <= 1 / omega),
                          min(ez_m - omega, 1 / omega - ez_p),
                          "E Z_{T-} >= omega and E Z_{T+} <= 1/omega",
                          {"EZ_t_minus": ez_m, "EZ_t_plus": ez_p, "omega": omega})
        C = _max_ratio(prof, prs)
        c2 = ClauseResult("thm_bounded_correlation.ii", _verdict(math.isfinite(C)),
                          C, "C = max_{x != y} q_xy / (q_x q_y) is finite", {"C": C})
        qbar = -curve.derivatives(window.t_minus)[1]
        prod = C * qbar * logn
        c3 = ClauseResult("thm_bounded_correlation.iii", _verdict(prod <= threshold), threshold - prod,
                          f"C * qbar * log n <= {threshold}", {"C": C, "qbar": qbar, "product": prod})
        return [c1, c2, c3]

    variants = [evaluate(profile, pairs.upper())]
    if profile.estimated or pairs.ci is not None:
        for p in _profile_variants(profile)[1:]:
            variants.append(evaluate(p, pairs.upper()))
        variants.append(evaluate(profile, pairs.lower()))
    clauses = _merge(variants)
    claims = {}
    if all(c.verdict == HOLDS for c in clauses):
        claims["whp_window"] = [window.t_minus, window.t_plus]
    return ConditionReport("thm_bounded_correlation", clauses, window, claims,
                           {"omega": omega, "threshold": threshold})


# ---------------------------------------------------------------------------
# balanced coupons


class NotBalanced(ValueError):
    pass


def _pair_offdiag(pairs: PairIntensities):
    return pairs.off_diagonal()


def balanced_checks(profile: IntensityProfile, pairs: PairIntensities, M: float | None = None,
                    omega: float | None = None, epsilon: float = 0.05) -> ConditionReport:
    """Whp lower bounds on ``T`` for balanced coupons (four clauses)."""
    if not profile.balanced:
        raise NotBalanced("balanced_checks needs a balanced profile")
    n = profile.n
    omega = default_omega(n) if omega is None else omega
    M = profile.M if M is None else M
    mu = profile.mu
    logn = math.log(n)
    curve = MomentCurve(profile)
    vals, wts = _pair_offdiag(pairs.upper())

    # (i) sum_{x != y} (e^{q_xy t} - 1) <= n^2 / log n and E Z_t >= omega
    def pair_sum(t):
        return math.fsum((wts * np.expm1(vals * t)).tolist())

    cap = n * n / logn

    def ok_i(t):
        return pair_sum(t) <= cap and curve.expected_uncovered(t) >= omega

    t_cand = (n / mu) * (logn - omega)
    s = pair_sum(max(t_cand, 0.0))
    ez = curve.expected_uncovered(max(t_cand, 0.0))
    hold_i = t_cand > 0 and s <= cap and ez >= omega
    lo, hi = 0.0, time_for_level(curve, omega)
    if ok_i(hi):
        t_best = hi
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if ok_i(mid):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-9 * hi:
                break
        t_best = lo
    c1 = ClauseResult("thm_balanced.i", _verdict(hold_i), math.log(cap) - math.log(max(s, 1e-300)),
                      "sum_{x != y}(e^{q_xy t}-1) <= n^2/log n and E Z_t >= omega at t = (n/mu)(log n - omega)",
                      {"t": t_cand, "pair_sum": s, "cap": cap, "EZ_t": ez, "largest_passing_t": t_best,
                       "lower_bound": t_cand if hold_i else None})

    # (ii) bad pairs above a threshold q
    order = np.argsort(vals)
    sv, sw = vals[order], wts[order]
    tail = np.concatenate([np.cumsum(sw[::-1])[::-1], [0.0]])
    levels = np.unique(sv)
    if levels.size > 256:
        levels = np.unique(np.quantile(sv, np.linspace(0, 1, 257)))
    best = None
    for thr in np.concatenate([[0.0], levels]):
        bad = float(tail[np.searchsorted(sv, thr, side="right")])
        beta = n if bad == 0 else min(n, n * n / bad)
        if beta <= 1:
            continue
        lim = mu / (n * math.log(beta) * omega)
        if thr <= lim and beta >= omega:
            bound = (n / mu) * (math.log(beta) - omega)
            if best is None or beta > best[0]:
                best = (beta, float(thr), bad, bound, lim)
    if best is None:
        c2 = ClauseResult("thm_balanced.ii", FAILS, None,
                          "beta >= omega, q <= mu/(n log(beta) omega), at most n^2/beta pairs above q", {})
    else:
        beta, thr, bad, bound, lim = best
        c2 = ClauseResult("thm_balanced.ii", _verdict(bound > 0), bound,
                          "beta >= omega, q <= mu/(n log(beta) omega), at most n^2/beta pairs above q",
                          {"beta": beta, "q": thr, "q_limit": lim, "bad_pairs": bad, "lower_bound": bound,
                           "sharp": bool(thr <= mu / (n * logn * omega) and bad <= n ** (1 + 1 / omega))})

    # (iii) small coupons
    bound3 = (n / mu) * (logn - math.log(M) - omega)
    c3 = ClauseResult("thm_balanced.iii", _verdict(bound3 > 0), bound3,
                      "T >= (n/mu)(log n - log M - omega)",
                      {"M": M, "lower_bound": bound3,
                       "sharp": bool(math.log(M) <= logn / omega)})

    # (iv) constant pair intensity
    equal = bool(vals.size == 0 or np.ptp(vals) <= 1e-12 * max(float(vals.max()), 1e-300))
    t4 = (n / mu) * min(n / (M * omega), logn - omega)
    c4 = ClauseResult("thm_balanced.iv", _verdict(equal and t4 > 0), t4 if equal else None,
                      "all q_xy equal; T- = (n/mu) min(n/(M omega), log n - omega)",
                      {"equal_pairs": equal, "t_minus": t4,
                       "sharp": bool(equal and M <= n / (logn * omega))})

    clauses = [c1, c2, c3, c4]
    lower = max([c.witness.get("lower_bound") or 0.0 for c in clauses if c.verdict == HOLDS]
                + [c4.witness["t_minus"] if c4.verdict == HOLDS else 0.0])
    claims = {"whp_lower": lower,
              "whp_upper": elementary_bounds(profile, epsilon).whp_upper,
              "sharp_n_log_n_over_mu": any(c.verdict == HOLDS and c.witness.get("sharp") for c in clauses),
              "n_log_n_over_mu": n * logn / mu}
    return ConditionReport("thm_balanced", clauses, None, claims, {"omega": omega, "M": M, "epsilon": epsilon})


# ---------------------------------------------------------------------------
# almost negative correlation


def negative_correlation_check(profile: IntensityProfile, pairs: PairIntensities,
                               delta: float = 0.01, eta_scale: float = 0.1,
                               b_exponent: float = 0.1) -> ConditionReport:
    """Balanced coupons whose pairs are almost negatively correlated."""
    if not profile.balanced:
        raise NotBalanced("negative_correlation_check needs a balanced profile")
    n = profile.n
    c = profile.q_star
    logn = math.log(n)
    # The second-moment argument needs eta * T* small, with
    # T* = log n / (-log(1-c)); for c bounded away from 0 this is the plain
    # eta <= scale / log n, for small c it is stricter.
    rate = -math.log1p(-c) if c < 1 else math.inf
    thr_plain = eta_scale / logn
    thr = thr_plain * min(1.0, rate)
    b_cap = n ** b_exponent

    def evaluate(prs):
        if c > 1 - delta:
            return [ClauseResult("thm_negative_correlation.c", FAILS, (1 - delta) - c,
                                 "c <= 1 - delta", {"c": c, "delta": delta})]
        denom = (1 - c) ** 2
        if prs.spectrum is not None:
            v = np.array([s[0] for s in prs.spectrum], float)
            cnt = np.array([s[1] for s in prs.spectrum], float)
            eta = (1 - 2 * c + v) / denom - 1
            b = float(cnt[eta > thr].sum())
            eta_ok = float(eta[eta <= thr].max()) if np.any(eta <= thr) else None
        else:
            Q = prs.dense()
            eta = (1 - 2 * c + Q) / denom - 1
            np.fill_diagonal(eta, -np.inf)
            b = float((eta > thr).sum(axis=1).max())
            ok = eta[np.isfinite(eta) & (eta <= thr)]
            eta_ok = float(ok.max()) if ok.size else None
        return [ClauseResult("thm_negative_correlation.c", HOLDS, (1 - delta) - c, "c <= 1 - delta",
                             {"c": c, "delta": delta}),
                ClauseResult("thm_negative_correlation.eta", _verdict(b <= b_cap), b_cap - b,
                             f"eta <= {eta_scale} min(1, -log(1-c)) / log n except for b <= n^{b_exponent} partners",
                             {"b": b, "b_cap": b_cap, "eta_threshold": thr, "eta_threshold_plain": thr_plain,
                              "max_regular_eta": eta_ok})]

    variants = [evaluate(pairs)]
    if pairs.ci is not None:
        variants += [evaluate(pairs.upper()), evaluate(pairs.lower())]
    clauses = _merge(variants)
    claims = {}
    if all(cl.verdict == HOLDS for cl in clauses):
        claims["T_asymptotic"] = logn / -math.log1p(-c)
    return ConditionReport("thm_negative_correlation", clauses, None, claims,
                           {"delta": delta, "eta_scale": eta_scale, "b_exponent": b_exponent})


# ---------------------------------------------------------------------------
# exchangeable coupons


def exchangeable_checks(profile: IntensityProfile, omega: float | None = None,
                        delta: float = 0.01) -> ConditionReport:
    """Size conditions under which an exchangeable collector behaves like a uniform one."""
    if not profile.exchangeable:
        raise ValueError("exchangeable_checks needs an exchangeable model")
    n = profile.n
    omega = default_omega(n) if omega is None else omega
    M, mu, chi = profile.M, profile.mu, profile.chi
    logn = math.log(n)
    a = math.sqrt(n * logn) / omega
    c1 = ClauseResult("thm_exchangeable.i", _verdict(M <= a), a - M, "M <= sqrt(n log n)/omega", {"M": M})
    b1, b2 = n / logn, math.sqrt(mu * n * logn) / omega
    c2 = ClauseResult("thm_exchangeable.ii", _verdict(M <= b1 and M <= b2), min(b1, b2) - M,
                      "M <= n/log n and M <= sqrt(mu n log n)/omega", {"M": M, "mu": mu})
    d2 = mu * n * logn / omega
    c3 = ClauseResult("thm_exchangeable.iii", _verdict(M <= b1 and chi <= d2), min(b1 - M, d2 - chi),
                      "M <= n/log n and chi <= mu n log n / omega", {"M": M, "chi": chi})
    dev = abs(chi / (mu * mu) - 1)
    tol = 1 / (mu * n * logn * omega)
    c4 = ClauseResult("thm_exchangeable.iv", _verdict(mu <= (1 - delta) * n and dev <= tol),
                      min((1 - delta) * n - mu, tol - dev),
                      "mu <= (1-delta) n and |chi/mu^2 - 1| <= 1/(mu n log n omega)",
                      {"mu": mu, "chi": chi, "deviation": dev, "tolerance": tol})
    clauses = [c1, c2, c3, c4]
    claims = {}
    if any(c.verdict == HOLDS for c in clauses) and mu < n:
        claims["T_asymptotic"] = logn / -math.log1p(-mu / n)
    return ConditionReport("thm_exchangeable", clauses, None, claims, {"omega": omega, "delta": delta})


# ---------------------------------------------------------------------------
# fast coverage


def balanced_time(n: int, mu: float) -> float:
    """``log n / (-log(1 - mu/n))``: the first-moment time of a uniform collector."""
    if mu >= n:
        return 1.0
    return math.log(n) / -math.log1p(-mu / n)


def _size_tail(model: CouponModel, draws: int, seed: int):
    law = model.size_law()
    if law is not None:
        s, p = np.asarray(law[0], float), np.asarray(law[1], float)
        keep = p > 0
        return s[keep], p[keep], False
    from .streams import ESTIMATE, stream

    b = model.draw_batch(stream(seed, ESTIMATE, 4), draws)
    sizes = np.where(b.full.astype(bool), model.n, np.diff(b.offsets))
    s, cnt = np.unique(sizes, return_counts=True)
    return s.astype(float), cnt / draws, True


def _block_cover_probs(model: CouponModel, partition, draws: int, seed: int):
    from .model import BlockPartition, Explicit

    if isinstance(model, BlockPartition) and partition is None:
        return np.full(model.blocks, 1 / model.blocks), False
    if isinstance(model, Explicit):
        probs = []
        for part in partition:
            need = set(int(v) for v in part)
            probs.append(math.fsum(p for (m, _), p in zip(model.support, model.probs) if need <= set(m)))
        return np.array(probs), False
    from .streams import ESTIMATE, stream

    b = model.draw_batch(stream(seed, ESTIMATE, 5), draws)
    hits = np.zeros(len(partition))
    label = np.full(model.n, -1)
    for i, part in enumerate(partition):
        label[np.asarray(part)] = i
    sizes = np.array([len(p) for p in partition])
    for j in range(len(b)):
        if b.full[j]:
            hits += 1
            continue
        got = np.bincount(label[b.coupon(j)], minlength=len(partition))[:len(partition)]
        hits += got == sizes
    return hits / draws, True


def fast_conditions(model: CouponModel, profile: IntensityProfile | None = None,
                    epsilon: float = 0.05, partition=None, draws: int = 100_000,
                    seed: int = 0, omega: float | None = None) -> ConditionReport:
    """Sufficient conditions for a transitive collector to beat the balanced time.

    Clause (i) is evaluated in the form its proof uses. Large coupons
    (size ``>= C mu``) arrive at rate ``P(|X| >= C mu)``; a uniform
    collector with such coupons needs about ``log n / (-log(1 - C mu / n))``
    of them. The clause holds when ``(1 + epsilon)`` times the resulting
    number of draws is at most the balanced time. The literal inequality
    ``P(|X| >= C mu) >= (1 + epsilon) / C`` contradicts Markov's inequality
    and is reported only as a margin.
    """
    from .intensity import profile as make_profile

    profile = make_profile(model) if profile is None else profile
    n, mu = profile.n, profile.mu
    logn = math.log(n)
    omega = default_omega(n) if omega is None else omega
    target = balanced_time(n, mu)
    pre_ok = bool(profile.transitive and mu <= n / logn)

    sizes, probs, est1 = _size_tail(model, draws, seed)
    best = None
    for s in sizes:
        C = s / mu
        if C < 1 + epsilon:
            continue
        pt = float(probs[sizes >= s].sum())
        big = min(C * mu, n)
        need = 1.0 if big >= n else max(1.0, logn / -math.log1p(-big / n))
        t_c = need / pt
        margin = target - (1 + epsilon) * t_c
        if best is None or margin > best["margin"]:
            best = {"C": C, "P_large": pt, "t_C": t_c, "margin": margin,
                    "literal_margin": pt - (1 + epsilon) / C}
    if best is None:
        c1 = ClauseResult("thm_fast.i", FAILS, None,
                          "(1+eps) * draws to cover with coupons of size >= C mu <= balanced time, C >= 1+eps",
                          {"reason": "no coupon size reaches (1+eps) mu"})
    else:
        v = _verdict(best["margin"] >= 0)
        if est1 and abs(best["margin"]) < 0.05 * target:
            v = INCONCLUSIVE
        c1 = ClauseResult("thm_fast.i", v, best["margin"],
                          "(1+eps) * draws to cover with coupons of size >= C mu <= balanced time, C >= 1+eps",
                          best)

    if partition is None and getattr(model, "kind", "") == "block_partition":
        partition = model.partition()
    if partition is None:
        c2 = ClauseResult("thm_fast.ii", FAILS, None, "partition clause needs a partition",
                          {"reason": "no partition supplied"})
    else:
        nprime = len(partition)
        pc, est2 = _block_cover_probs(model, partition if getattr(model, "kind", "") != "block_partition" else None,
                                      draws, seed)
        need = (1 + epsilon) * (math.log(nprime) / logn) * -math.log1p(-mu / n) if nprime > 1 else math.inf
        pmin = float(pc.min())
        ok = nprime >= omega and nprime <= n / mu + 1e-9 and pmin >= need
        v = _verdict(ok)
        if est2 and nprime >= omega and abs(pmin - need) < 3 * math.sqrt(max(pmin, 1e-12) / draws):
            v = INCONCLUSIVE
        c2 = ClauseResult("thm_fast.ii", v, pmin - need,
                          "n' >= omega, n' <= n/mu, min_i P(V_i in X) >= (1+eps)(log n'/log n)(-log(1-mu/n))",
                          {"n_prime": nprime, "min_block_prob": pmin, "required": need})
    clauses = [c1, c2]
    fast = pre_ok and any(c.verdict == HOLDS for c in clauses)
    claims = {"fast": fast, "status": "fast" if fast else "not fast",
              "balanced_time": target, "precondition": pre_ok}
    return ConditionReport("thm_fast", clauses, None, claims, {"epsilon": epsilon, "omega": omega})
