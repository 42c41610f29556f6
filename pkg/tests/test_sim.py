from __future__ import annotations

import math

import numpy as np
import pytest

from covertime import analytic as A
from covertime import model as M
from covertime import oracle as O
from covertime import sim
from covertime.intensity import profile


def test_sample_times_deterministic_across_threads():
    m = M.KUniform(30, 3)
    runs = [sim.sample_times(m, 300, master_seed=11, threads=t) for t in (1, 4, 8)]
    for r in runs[1:]:
        np.testing.assert_array_equal(r.all_samples, runs[0].all_samples)
        assert r.to_dict(include_samples=True) == runs[0].to_dict(include_samples=True)


def test_different_seeds_differ():
    m = M.KUniform(30, 3)
    a = sim.sample_times(m, 50, master_seed=1).all_samples
    b = sim.sample_times(m, 50, master_seed=2).all_samples
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("m", [M.KUniform(50, 4), M.BlockPartition(6, 5)], ids=lambda m: m.kind)
def test_trace_invariants(m):
    cps = list(range(0, 400, 5))
    for seed in range(5):
        tr = sim.run_once(m, seed=seed, checkpoints=cps)
        counts = [u for _, u in tr.uncovered_counts]
        assert all(b <= a for a, b in zip(counts, counts[1:]))
        # every coupon has exactly k members
        k = m.k
        assert int(tr.degrees.sum()) == k * int(tr.T)
        assert tr.holdout.size >= 1
        assert np.all(tr.first_hit[tr.holdout] == tr.T)


def test_lottery_degrees_count_full_coupons():
    m = M.Lottery(40, 0.05)
    tr = sim.run_once(m, seed=3)
    # the last coupon is the lottery win or the last singleton; every vertex counts it if full
    assert tr.degrees.min() >= 1


def test_mean_matches_oracle_within_three_standard_errors():
    m = M.KUniform(8, 1)
    s = sim.sample_times(m, 20_000, master_seed=5)
    assert abs(s.mean - O.expected_T_ie(m)) <= 3 * s.std_error


def test_pmf_close_to_exact():
    m = M.KUniform(6, 2)
    s = sim.sample_times(m, 20_000, master_seed=8)
    d = O.exchangeable_exact_model(m)
    assert O.total_variation(s.pmf(d.t_max), d.pmf) < 0.03


def test_censoring_and_infinite_time():
    m = M.Explicit(3, [((0, 1), 1.0)])
    s = sim.sample_times(m, 5, cap=50)
    assert s.censored == 5 and s.samples.size == 0
    tr = sim.run_once(m, cap=20)
    assert not tr.finite and tr.holdout.tolist() == [2]


def test_half_time_monotone_trace_and_bracket():
    m = M.KUniform(20, 2)
    res = sim.empirical_half_time(m, trials_per_t=400, seed=2)
    trace = sorted(res.trace)
    ps = [p for _, p, _ in trace]
    # nondecreasing up to sampling noise
    assert all(b >= a - 0.08 for a, b in zip(ps, ps[1:]))
    d = O.exchangeable_exact_model(m)
    assert abs(res.t_half - d.median()) <= 2
    eb = A.elementary_bounds(profile(m))
    assert eb.t_half_lo <= res.t_half <= eb.t_half_hi


def test_poissonized_matches_expected_uncovered():
    m = M.KUniform(40, 3)
    curve = A.MomentCurve(profile(m))
    for t in (5.0, 20.0, 50.0):
        est = sim.poissonized_uncovered(m, t, replicates=800, seed=4)
        assert abs(est.mean - curve.expected_uncovered(t)) <= est.ci * 3 / 2.5758 + 1e-12


def test_aldous_full_set_ratio_one():
    est = sim.aldous_ratio(M.FullSet(5), outer_reps=5, inner_reps=3)
    assert est.ratio == 1.0


def test_aldous_singletons_small():
    est = sim.aldous_ratio(M.KUniform(1000, 1), outer_reps=20, inner_reps=10, seed=1)
    assert est.ratio <= 0.25


def test_aldous_lottery_near_one():
    est = sim.aldous_ratio(M.Lottery(1000, 0.005), outer_reps=30, inner_reps=10, seed=1)
    assert est.ratio > 0.6


def test_summary_exports(tmp_path):
    s = sim.sample_times(M.KUniform(10, 2), 30, master_seed=0)
    s.to_csv(tmp_path / "t.csv")
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0] == "replicate,T" and len(rows) == 31
    d = s.to_dict()
    assert d["replicates"] == 30 and "quantiles" in d
    assert s.empirical_tail(0) == 1.0
    assert s.fraction_below(math.inf) == 1.0
