from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from covertime import graphs, intensity
from covertime import model as M
from covertime.intensity import SizeCapError, holder_mean, pair_intensities, profile

pos_vectors = st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=30)


@given(pos_vectors, st.lists(st.floats(-20, 20), min_size=2, max_size=8))
def test_holder_monotone_in_alpha(q, alphas):
    alphas = sorted(set(alphas) | {0.0})
    vals = [holder_mean(q, a) for a in alphas]
    for a, b in zip(vals, vals[1:]):
        assert b >= a * (1 - 1e-12)


@given(st.lists(st.floats(0.1, 1.0), min_size=1, max_size=30))
def test_holder_limits(q):
    # entries within a factor of 10; power-mean sandwich at |alpha| = 64
    n, hi, lo = len(q), max(q), min(q)
    assert hi * n ** (-1 / 64) * (1 - 1e-12) <= holder_mean(q, 64) <= hi * (1 + 1e-12)
    assert lo * (1 - 1e-12) <= holder_mean(q, -64) <= lo * n ** (1 / 64) * (1 + 1e-12)
    assert holder_mean(q, 2 ** 26) == pytest.approx(hi, rel=1e-6)
    assert holder_mean(q, -(2 ** 26)) == pytest.approx(lo, rel=1e-6)
    assert holder_mean(q, 1) == pytest.approx(float(np.mean(q)))


@given(st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=10), st.floats(-1e-3, 1e-3))
def test_holder_continuous_at_zero(q, alpha):
    g = float(np.exp(np.mean(np.log(q))))
    assert holder_mean(q, alpha) == pytest.approx(g, rel=1e-2)
    assert holder_mean(q, 1e-300) == pytest.approx(g, rel=1e-12)


def test_holder_zero_entry():
    with pytest.raises(ValueError):
        holder_mean([0.0, 0.5], -1)
    assert holder_mean([0.0, 0.5], 1) == 0.25


def test_alpha_grid():
    assert intensity.alpha_grid(10 ** 4) == [0, 1, 2, 4, 8, 16]


@pytest.mark.parametrize("m", [M.KUniform(50, 7), M.Lottery(40, 0.05), M.BlockPartition(4, 5),
                               M.HypercubeSubcube(8, 3)], ids=lambda m: m.kind)
def test_balanced_q_star_is_mu_over_n(m):
    p = profile(m)
    assert p.balanced
    assert p.q_star == pytest.approx(p.mu / p.n, rel=1e-12)


def test_profile_huge_broadcast_is_cheap():
    p = profile(M.HypercubeSubcube(30, 3))
    assert p.n == 2 ** 30 and p.q_star == 0.125


@pytest.mark.parametrize("m", [M.KUniform(12, 4), M.BlockPartition(3, 4), M.GraphNeighborhood(graphs.cycle(9)),
                               M.SpanningTree(graphs.complete(5)), M.Lottery(10, 0.3),
                               M.Explicit(4, [((0, 1, 2), 0.5), ((3,), 0.5)])], ids=lambda m: m.kind)
def test_pair_row_sums_bounded_by_M_q(m):
    p = profile(m)
    Q = pair_intensities(m).dense()
    q = m.element_probs()
    for x in range(m.n):
        assert Q[x].sum() <= p.M * q[x] + 1e-9


def test_k_uniform_pairs_exact():
    P = pair_intensities(M.KUniform(5, 2))
    off, _ = P.off_diagonal()
    np.testing.assert_allclose(off, 0.1)


def test_subcube_dense_matches_closed_form():
    m = M.HypercubeSubcube(6, 2)
    Q = pair_intensities(m).dense()
    for x in range(0, 64, 7):
        for y in range(64):
            if x != y:
                assert Q[x, y] == pytest.approx(m.pair_prob(x, y), abs=1e-15)


def test_explicit_deterministic_pair():
    P = pair_intensities(M.Explicit(2, [((0, 1), 1.0)]))
    assert P.value(0, 1) == 1.0


def test_dense_refused_above_cap():
    with pytest.raises(SizeCapError):
        pair_intensities(M.KUniform(5000, 3), dense=True)
    P = pair_intensities(M.KUniform(5000, 3))
    assert P.mode == "callback"


def test_wilson_interval_contains_p():
    lo, hi = intensity.wilson_interval(30, 100)
    assert lo < 0.3 < hi


def test_profile_exports(tmp_path):
    p = profile(M.GraphNeighborhood(graphs.path(4)))
    d = json.loads(p.to_json())
    assert d["n"] == 4 and "holder_means" in d
    p.to_csv(tmp_path / "q.csv")
    lines = (tmp_path / "q.csv").read_text().splitlines()
    assert lines[0] == "element,q" and len(lines) == 5
