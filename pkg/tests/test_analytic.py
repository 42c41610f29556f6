from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from covertime import analytic as A
from covertime import graphs
from covertime import model as M
from covertime.intensity import IntensityProfile, pair_intensities, profile

q_vectors = st.lists(st.floats(0.005, 0.6), min_size=2, max_size=40)


def _curve(q):
    q = np.asarray(q, dtype=float)
    return A.MomentCurve(IntensityProfile(q, float(q.sum()), 1.0, 1.0))


@given(q_vectors, st.floats(0, 2000), st.floats(0, 2000))
def test_f_convex(q, s, t):
    c = _curve(q)
    assert c.f((s + t) / 2) <= (c.f(s) + c.f(t)) / 2 + 1e-9


@given(q_vectors, st.floats(0, 500), st.floats(1e-3, 50))
def test_expected_uncovered_decreasing(q, t, h):
    c = _curve(q)
    assert c.expected_uncovered(t + h) < c.expected_uncovered(t)


@given(q_vectors, st.floats(0, 1000))
def test_inequality_one(q, t):
    c = _curve(q)
    f, f1, _ = c.derivatives(t)
    assert f - t * f1 <= math.log(len(q)) + 1e-9


@given(q_vectors, st.floats(0, 500), st.floats(0, 100))
def test_inequality_two(q, t, d):
    c = _curve(q)
    f1 = c.derivatives(t)[1]
    if t - d >= 0:
        assert c.f(t - d) - c.f(t) >= -d * f1 - 1e-9
    # forward step: the tangent taken at the far end
    assert c.f(t) - c.f(t + d) >= -d * c.derivatives(t + d)[1] - 1e-9
    # both steps still gain at least d * min q
    assert c.f(t) - c.f(t + d) >= d * min(q) - 1e-9


def test_forward_step_with_near_tangent_can_fail():
    # with the tangent at t itself the forward inequality reverses for strictly convex f
    c = _curve([0.01, 0.5])
    t, d = 1.0, 10.0
    assert c.f(t) - c.f(t + d) < -d * c.derivatives(t)[1]


@given(st.lists(st.floats(0.01, 0.3), min_size=2, max_size=20), st.floats(1, 60))
def test_derivatives_match_finite_differences(q, t):
    c = _curve(q)
    _, f1, f2 = c.derivatives(t)
    assume(f2 > 1e-4 * f1 * f1)  # away from the balanced limit where f'' vanishes
    h = 0.03 / max(q)  # a fixed fraction of the fastest decay time
    # Richardson-extrapolated centred differences
    d1 = lambda h: (c.f(t + h) - c.f(t - h)) / (2 * h)  # noqa: E731
    d2 = lambda h: (c.f(t + h) - 2 * c.f(t) + c.f(t - h)) / (h * h)  # noqa: E731
    fd1 = (4 * d1(h / 2) - d1(h)) / 3
    fd2 = (4 * d2(h) - d2(2 * h)) / 3
    assert fd1 == pytest.approx(f1, rel=1e-5)
    assert fd2 == pytest.approx(f2, rel=1e-5)


@given(st.lists(st.floats(0.01, 0.3), min_size=2, max_size=12), st.floats(0.5, 40))
def test_f2_equals_pair_formula(q, t):
    c = _curve(q)
    qa = np.asarray(q)
    ez = c.expected_uncovered(t)
    s = sum((a - b) ** 2 * math.exp(-(a + b) * t) for a in qa for b in qa)
    assert c.derivatives(t)[2] == pytest.approx(s / (2 * ez * ez), rel=1e-9, abs=1e-15)


@given(st.lists(st.floats(0.001, 0.9), min_size=2, max_size=60))
def test_window_brackets_unit_level(q):
    p = IntensityProfile(np.asarray(q), float(sum(q)), 1.0, 1.0)
    w = A.first_moment_window(p).window
    c = A.MomentCurve(p)
    assert c.expected_uncovered(w.t_minus) > 1 > c.expected_uncovered(w.t_plus)
    assert c.expected_uncovered(w.t_star) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("n,k", [(10, 1), (10 ** 4, 25), (1000, 999)])
def test_balanced_t_star_closed_form(n, k):
    p = profile(M.KUniform(n, k))
    assert A.t_star(A.MomentCurve(p)) == pytest.approx(math.log(n) / (k / n), rel=1e-12)


def test_t_star_bisection_matches_closed_form_for_balanced_vector():
    q = np.full(50, 0.02)
    q[0] = 0.02 * (1 + 1e-7)
    c = _curve(q)
    assert A.t_star(c) == pytest.approx(math.log(50) / 0.02, rel=1e-6)


def test_second_moment_dense_vs_spectrum():
    m = M.KUniform(40, 5)
    p = profile(m)
    pr = pair_intensities(m)
    spec = A.MomentCurve(p, pr).second_moment(30.0)
    q = np.full(40, 5 / 40)
    dense = A.MomentCurve(IntensityProfile(q, 5.0, 5.0, 25.0), pr).second_moment(30.0)
    assert spec == pytest.approx(dense, rel=1e-12)


def test_second_moment_is_at_least_first_squared():
    m = M.GraphNeighborhood(graphs.path(12))
    c = A.MomentCurve(profile(m), pair_intensities(m))
    for t in (0.0, 3.0, 10.0, 30.0):
        ez = c.expected_uncovered(t)
        assert c.second_moment(t) >= ez * ez * (1 - 1e-12)
    assert c.second_moment(0.0) == pytest.approx(144.0)


def test_elementary_bounds_k_uniform():
    eb = A.elementary_bounds(profile(M.KUniform(10 ** 4, 25)), epsilon=0.5)
    rate = -math.log1p(-0.0025)
    assert eb.t_half_lo == pytest.approx(math.log(2) / rate)
    assert eb.t_half_hi == pytest.approx(math.log(2e4) / rate)
    assert eb.whp_upper == pytest.approx(1.5 * math.log(1e4) / rate)
    assert eb.whp_upper == pytest.approx(5519.29, abs=0.01)
    assert eb.failure_prob == pytest.approx(0.01)


def test_lottery_law():
    law = A.lottery_analytics(10 ** 4, 5e-4)
    assert law.expected_T == pytest.approx(2000)
    assert law.t_half == pytest.approx(1386.29, abs=0.01)
    assert law.tail(1.0) == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("n,k", [(2, 1), (10, 3), (100, 1), (100, 99), (1000, 25)])
def test_k_uniform_correlation_constant_at_most_one(n, k):
    m = M.KUniform(n, k)
    r = A.bounded_correlation_check(profile(m), pair_intensities(m))
    assert r.clause("thm_bounded_correlation.ii").witness["C"] <= 1 + 1e-12


def test_bounded_correlation_verdicts():
    m = M.KUniform(10 ** 4, 25)
    assert A.bounded_correlation_check(profile(m), pair_intensities(m)).all_hold
    lot = M.Lottery(10 ** 4, 5e-4)
    r = A.bounded_correlation_check(profile(lot), pair_intensities(lot))
    assert r.clause("thm_bounded_correlation.iii").verdict == A.FAILS


def test_balanced_requires_balanced():
    m = M.GraphNeighborhood(graphs.path(5))
    with pytest.raises(A.NotBalanced):
        A.balanced_checks(profile(m), pair_intensities(m))


def test_balanced_claims_k_uniform():
    m = M.KUniform(10 ** 4, 25)
    r = A.balanced_checks(profile(m), pair_intensities(m), epsilon=0.5)
    assert r.clause("thm_balanced.i").verdict == A.HOLDS
    assert r.claims["whp_upper"] == pytest.approx(5519.29, abs=0.01)
    assert r.claims["whp_lower"] > 0
    assert r.claims["n_log_n_over_mu"] == pytest.approx(3684.1, abs=0.1)


def test_exchangeable_size_conditions():
    r = A.exchangeable_checks(profile(M.KUniform(10 ** 4, 25)))
    assert r.any_holds
    r = A.exchangeable_checks(profile(M.Lottery(10 ** 4, 5e-4)))
    assert not r.any_holds


def test_negative_correlation():
    for m in (M.KUniform(10 ** 4, 25), M.SpanningTree(graphs.cycle(20))):
        assert A.negative_correlation_check(profile(m), pair_intensities(m)).all_hold
    lot = M.Lottery(10 ** 4, 5e-4)
    assert not A.negative_correlation_check(profile(lot), pair_intensities(lot)).all_hold


def test_fast_conditions():
    assert A.fast_conditions(M.Lottery(10 ** 4, 1e-3)).claims["status"] == "fast"
    assert A.fast_conditions(M.BlockPartition(100, 100)).claims["status"] == "fast"
    assert A.fast_conditions(M.KUniform(10 ** 4, 25)).claims["status"] == "not fast"


def test_report_json_round_trip():
    import json
    p = profile(M.KUniform(100, 3))
    d = json.loads(A.first_moment_window(p).to_json())
    assert d["theorem"] == "thm_first_moment"
    assert {c["id"] for c in d["clauses"]} >= {"thm_first_moment.i"}


def test_gumbel_and_erdos_renyi():
    assert A.gumbel_law(10 ** 4, 25, 2.0) == pytest.approx(math.exp(-2))
    assert A.erdos_renyi_cdf(0.0) == pytest.approx(0.36788, abs=1e-5)
    assert A.erdos_renyi_cdf(1.0) == pytest.approx(0.69220, abs=1e-5)


def test_infinite_time_when_q_star_zero():
    p = IntensityProfile(np.array([0.0, 0.5]), 0.5, 1.0, 1.0)
    assert A.t_star(A.MomentCurve(p)) == math.inf
    with pytest.raises(A.InfiniteTime):
        A.elementary_bounds(p)


def test_moment_curve_examples():
    c = _curve([0.5, 0.25])
    assert c.expected_uncovered(2.0) == pytest.approx(math.exp(-1) + math.exp(-0.5), rel=1e-15)
    assert c.expected_uncovered(0.0) == 2.0
    # u = e^{-t/4} solves u^2 + u - 1 = 0
    golden = (math.sqrt(5) - 1) / 2
    assert A.t_star(c) == pytest.approx(-4 * math.log(golden), rel=1e-9)
    bal = A.MomentCurve(IntensityProfile(np.full(100, 0.01), 1.0, 1.0, 1.0))
    assert bal.expected_uncovered(100.0) == pytest.approx(100 * math.exp(-1), rel=1e-14)
    assert A.t_star(bal) == pytest.approx(460.517, abs=1e-3)
    f, f1, f2 = bal.derivatives(50.0)
    assert f2 == pytest.approx(0.0, abs=1e-15) and f1 == pytest.approx(-0.01)
    q = np.array([0.1, 0.9])
    c = _curve(q)
    f, f1, _ = c.derivatives(0.0)
    assert f == pytest.approx(math.log(2)) and f1 == pytest.approx(-0.5)
    h = 1e-5
    assert (c.f(1 + h) - c.f(1 - h)) / (2 * h) == pytest.approx(c.derivatives(1.0)[1], abs=1e-6)


def test_second_moment_examples():
    m = M.Explicit(2, [((0, 1), 1.0)])
    c = A.MomentCurve(profile(m), pair_intensities(m))
    assert c.second_moment(1.0) == pytest.approx(4 * math.exp(-1))
    single = M.Explicit(1, [((0,), 0.5), ((), 0.5)])
    c = A.MomentCurve(profile(single), pair_intensities(single))
    assert c.second_moment(2.0) == pytest.approx(math.exp(-1))
    assert c.second_moment(0.0) == 1.0


def test_elementary_bounds_small_cases():
    eb = A.elementary_bounds(profile(M.KUniform(2, 1)))
    assert (eb.t_half_lo, eb.t_half_hi) == pytest.approx((1.0, 2.0))
    from covertime import oracle
    assert oracle.cover_prob_ie(M.KUniform(2, 1), 2) == pytest.approx(0.5)
    eb = A.elementary_bounds(profile(M.FullSet(4)))
    assert (eb.t_half_lo, eb.t_half_hi, eb.whp_upper) == (1.0, 1.0, 1.0)
