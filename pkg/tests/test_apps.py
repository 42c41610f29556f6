from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from covertime import analytic as A
from covertime import apps, graphs
from covertime import model as M
from covertime.intensity import profile


def _brute_sat(clauses, n_vars):
    for bits in itertools.product((False, True), repeat=n_vars):
        a = {v + 1: bits[v] for v in range(n_vars)}
        if all(apps.satisfies(a, c) for c in clauses):
            return True
    return False


@given(st.integers(0, 2 ** 32), st.integers(2, 7), st.integers(1, 3), st.integers(1, 40))
def test_dpll_agrees_with_brute_force(seed, n_vars, k, n_clauses):
    k = min(k, n_vars)
    rng = np.random.default_rng(seed)
    model = M.HypercubeSubcube(n_vars, k)
    clauses = [apps.random_clause(model, rng) for _ in range(n_clauses)]
    w = apps.dpll(clauses, n_vars)
    assert (w is not None) == _brute_sat(clauses, n_vars)
    if w is not None:
        assert all(apps.satisfies(w, c) for c in clauses)


def test_dpll_timeout():
    rng = np.random.default_rng(0)
    model = M.HypercubeSubcube(20, 3)
    clauses = [apps.random_clause(model, rng) for _ in range(90)]
    with pytest.raises(apps.SolverTimeout):
        apps.dpll(clauses, 20, budget=1)


def _subcube_cover_time(clauses, d):
    covered = np.zeros(2 ** d, dtype=bool)
    xs = np.arange(2 ** d)
    for t, c in enumerate(clauses, 1):
        hit = np.ones(2 ** d, dtype=bool)
        for lit in c:
            bit = (xs >> (abs(lit) - 1)) & 1
            hit &= bit == (0 if lit > 0 else 1)
        covered |= hit
        if covered.all():
            return t
    return math.inf


@pytest.mark.parametrize("seed", range(6))
def test_sat_time_is_subcube_cover_time_and_monotone(seed):
    d, k = 8, 3
    T, st_ = apps.sat_once(d, k, np.random.default_rng(seed))
    assert st_.status == "unsat"
    assert T == _subcube_cover_time(st_.clauses, d)
    # satisfiable exactly on the prefixes before T
    for j in range(max(1, T - 6), T + 1):
        assert (apps.dpll(st_.clauses[:j], d) is not None) == (j < T)


def test_dimacs_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    model = M.HypercubeSubcube(6, 3)
    clauses = [apps.random_clause(model, rng) for _ in range(10)]
    apps.write_dimacs(clauses, 6, tmp_path / "f.cnf")
    back, n = apps.read_dimacs(tmp_path / "f.cnf")
    assert n == 6 and back == clauses


def test_first_moment_ratio_k3():
    assert apps.first_moment_ratio(3) == pytest.approx(5.191, abs=1e-3)
    r = apps.sat_threshold(10, 3, 5, master_seed=0)
    assert r.threshold_asymptotic == 10 * 8 * math.log(2)


def test_subcube_pair_table():
    t = apps.subcube_pair_table(6, 2)
    assert t[0] == 0.25
    assert t[1] == pytest.approx(10 / 60)
    assert np.all(t[5:] == 0)
    m = M.HypercubeSubcube(6, 2)
    assert m.pair_prob(0, 1) == t[1]


def test_subcube_pair_profile_feeds_balanced_checks():
    d, k = 16, 3
    p = profile(M.HypercubeSubcube(d, k))
    pairs = apps.subcube_pair_profile(d, k)
    r = A.balanced_checks(p, pairs)
    assert r.clause("thm_balanced.i").verdict in (A.HOLDS, A.FAILS)
    assert "pair_sum" in r.clause("thm_balanced.i").witness


@pytest.mark.parametrize("seed", range(20))
def test_connectivity_coupling(seed):
    tc, ti = apps.connect_once(60, np.random.default_rng(seed))
    assert tc >= ti >= 30


def test_connectivity_result_flags():
    r = apps.connectivity_time(100, 30, master_seed=2)
    assert r.coupled_ok
    assert 0.0 <= r.prob_connected(r.target) <= 1.0
    assert r.t1 == pytest.approx(apps.cut_coupon_time(100, 1))


@pytest.mark.parametrize("surface", ["torus", "square"])
def test_disc_sandwich(surface):
    for seed in range(5):
        ti, to = apps.disc_once(400.0, 2.0, surface == "torus", np.random.default_rng(seed))
        assert to <= ti
    r = apps.disc_coverage_time(400.0, 2.0, surface, replicates=10, master_seed=1)
    assert r.sandwich_ok
    assert r.tile_side <= 0.1 * 2.0 + 1e-12


def test_tiling():
    m, s = apps.tiling(100.0, 3.0)
    assert m == 334 and s == pytest.approx(100 / 334)


@pytest.mark.parametrize("g", [graphs.cycle(7), graphs.complete(6), graphs.random_regular(30, 4, seed=2),
                               graphs.path(5)], ids=lambda g: g.tag or "g")
def test_wilson_trees_are_spanning(g):
    m = M.SpanningTree(g, method="sample", estimate_draws=1)
    rng = np.random.default_rng(0)
    for _ in range(200):
        assert apps.is_spanning_tree(g, m.tree(rng))


def test_wilson_uniform_on_k4():
    g = graphs.complete(4)
    m = M.SpanningTree(g, method="sample", estimate_draws=1)
    rng = np.random.default_rng(3)
    N = 32_000
    c = Counter(tuple(sorted(m.tree(rng).tolist())) for _ in range(N))
    assert len(c) == 16
    freq = np.array(list(c.values())) / N
    assert np.all(np.abs(freq - 1 / 16) < 4 * math.sqrt((1 / 16) / N))


def test_tree_cover_on_cycle():
    r = apps.spanning_tree_cover(graphs.cycle(8), 200, master_seed=0)
    # each tree drops one uniform edge; every edge is covered once two drops differ
    assert r.summary.samples.min() >= 2
    assert r.summary.mean == pytest.approx(1 + 8 / 7, abs=0.2)
    assert r.summary.censored == 0


def test_is_spanning_tree_rejects():
    g = graphs.cycle(4)
    assert not apps.is_spanning_tree(g, [0, 1])
    assert not apps.is_spanning_tree(g, [0, 0, 1])
