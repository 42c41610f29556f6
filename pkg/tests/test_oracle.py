from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from covertime import model as M
from covertime import oracle as O

from helpers import random_explicit


def test_three_element_one_uniform():
    m = M.KUniform(3, 1)
    assert O.cover_prob_ie(m, 2) == pytest.approx(0.0, abs=1e-15)
    assert O.cover_prob_ie(m, 3) == pytest.approx(2 / 9, abs=1e-15)
    d = O.chain_distribution(m, 10)
    assert d.pmf[3] == pytest.approx(2 / 9, abs=1e-15)
    assert O.expected_T_ie(m) == pytest.approx(5.5, abs=1e-12)


def test_eight_element_expected_time():
    m = M.KUniform(8, 1)
    h8 = math.fsum(1 / i for i in range(1, 9))
    assert O.expected_T_ie(m) == pytest.approx(8 * h8, abs=1e-10)
    assert O.expected_T_ie(m) == pytest.approx(21.742857, abs=1e-6)
    assert O.chain_distribution(m).expected_T == pytest.approx(8 * h8, abs=1e-8)
    assert O.exchangeable_exact_model(m).expected_T == pytest.approx(8 * h8, abs=1e-9)


def test_full_coupon_is_point_mass():
    d = O.exchangeable_exact(7, {7: 1.0})
    assert d.pmf[1] == 1.0 and d.expected_T == 1.0
    d = O.chain_distribution(M.KUniform(4, 4), 5)
    assert d.pmf[1] == pytest.approx(1.0)


@given(st.integers(0, 2 ** 32), st.integers(1, 8))
def test_dual_oracle_agreement(seed, n):
    m = random_explicit(np.random.default_rng(seed), n)
    d = O.chain_distribution(m)
    pmf_ie = O.ie_pmf(m, d.t_max)
    assert O.total_variation(d.pmf, pmf_ie) <= 1e-10
    et = O.expected_T_ie(m)
    assert d.expected_T == pytest.approx(et, rel=1e-8)


@given(st.integers(0, 2 ** 32), st.integers(1, 8))
def test_ie_cover_prob_nondecreasing(seed, n):
    m = random_explicit(np.random.default_rng(seed), n)
    vals = [O.cover_prob_ie(m, t) for t in range(60)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n,k", [(5, 1), (8, 3), (10, 4), (12, 2), (12, 11)])
def test_exchangeable_matches_chain(n, k):
    m = M.KUniform(n, k)
    a = O.exchangeable_exact_model(m)
    b = O.chain_distribution(m, a.t_max)
    assert O.total_variation(a.pmf, b.pmf) <= 1e-10
    assert a.expected_T == pytest.approx(b.expected_T, rel=1e-9)


def test_exchangeable_lottery_size_law_matches_chain():
    m = M.Lottery(9, 0.1)
    a = O.exchangeable_exact_model(m)
    b = O.chain_distribution(m, a.t_max)
    assert O.total_variation(a.pmf, b.pmf) <= 1e-10


def test_size_caps():
    with pytest.raises(O.OracleSizeError):
        O.chain_distribution(M.KUniform(17, 1))
    with pytest.raises(O.OracleSizeError):
        O.avoid_probs(M.KUniform(21, 1))


def test_expected_time_infinite_when_element_unreachable():
    m = M.Explicit(3, [((0, 1), 1.0)])
    assert O.expected_T_ie(m) == math.inf


def test_distribution_helpers_and_json():
    d = O.exchangeable_exact(20, {3: 1.0})
    assert d.cdf()[-1] + d.tail_mass == pytest.approx(1.0, abs=1e-12)
    med = d.median()
    assert d.cdf()[med] >= 0.5 > d.cdf()[med - 1]
    assert d.prob_greater(-1) == 1.0
    assert d.prob_greater(med) == pytest.approx(1 - d.cdf()[med], abs=1e-12)
    out = d.to_dict()
    assert set(out) >= {"pmf", "tail_mass", "expected_T"}


def test_large_exchangeable_runs_fast():
    d = O.exchangeable_exact(10 ** 4, {25: 1.0})
    assert d.expected_T == pytest.approx(3910.8, abs=0.1)
    assert d.tail_mass < 1e-12
