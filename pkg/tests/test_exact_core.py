from fractions import Fraction

import pytest

from coin_duel.exact_core import (
    StartCounts,
    binomial,
    expected_turns,
    tie_prob_finite,
    tie_prob_partial,
    tie_prob_truncated,
)
from coin_duel.markov_oracle import expected_turns_dp, tie_prob_dp
from oracles import raw_chain


@pytest.mark.parametrize("n, r, expected", [(0, 0, 1), (4, 2, 6), (5, -1, 0), (3, 4, 0)])
def test_binomial_examples(n, r, expected):
    assert binomial(n, r) == expected


def test_binomial_pascal_rule():
    for n in range(1, 65):
        for r in range(0, n + 1):
            assert binomial(n, r) == binomial(n - 1, r - 1) + binomial(n - 1, r)


def test_binomial_rejects_negative_n():
    with pytest.raises(ValueError):
        binomial(-1, 0)


def test_tie_prob_finite_small_values():
    assert tie_prob_finite(1) == Fraction(1, 3)
    assert tie_prob_finite(2) == Fraction(5, 27)
    assert tie_prob_finite(5) == tie_prob_dp(5, 5, Fraction(1, 2))


@pytest.mark.parametrize("k", range(1, 7))
def test_tie_prob_finite_matches_uncompressed_chain(k):
    # the raw chain keeps double-tail rounds, so it does not rely on compression
    _, tie = raw_chain(k, k)
    assert float(tie_prob_finite(k)) == pytest.approx(tie, abs=1e-12)


def test_tie_prob_finite_strictly_decreasing():
    values = [tie_prob_finite(k) for k in range(1, 51)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_tie_prob_finite_rejects_zero():
    with pytest.raises(ValueError):
        tie_prob_finite(0)


def test_partial_sum_first_two_terms():
    assert tie_prob_partial(1, 2) == pytest.approx(0.3125, abs=1e-15)
    assert tie_prob_partial(3, 2) == 0.0


def test_truncated_k1():
    res = tie_prob_truncated(1, 1e-12)
    assert abs(res.value - 1 / 3) <= 1e-12
    assert res.tail_bound <= 1e-12


def test_truncated_agrees_with_finite_sum_k4():
    assert abs(tie_prob_truncated(4, 1e-12).value - float(tie_prob_finite(4))) <= 1e-12


@pytest.mark.parametrize("eps", [1e-6, 1e-12])
def test_truncated_tail_bound_is_rigorous(eps):
    for k in range(1, 21):
        res = tie_prob_truncated(k, eps)
        exact = float(tie_prob_finite(k))
        assert res.tail_bound <= eps
        assert res.value <= exact + 1e-15
        assert exact - res.value <= res.tail_bound + 1e-15


@pytest.mark.parametrize("eps", [0, -1e-3, 1.5])
def test_truncated_rejects_bad_eps(eps):
    with pytest.raises(ValueError):
        tie_prob_truncated(3, eps)


def test_truncated_large_k_is_fast_and_sane():
    res = tie_prob_truncated(100_000, 1e-9)
    # leading-order normal approximation 1 / (2 sqrt(2 pi k))
    assert res.value == pytest.approx(0.5 / (2 * 3.141592653589793 * 100_000) ** 0.5, rel=1e-3)


def test_expected_turns_examples():
    assert expected_turns(StartCounts(1, 1)) == Fraction(4, 3)
    assert expected_turns(StartCounts(1, 2)) == Fraction(16, 9)
    assert expected_turns(StartCounts(10, 10)) == expected_turns_dp(10, 10)


def test_expected_turns_is_symmetric():
    assert expected_turns(StartCounts(5, 2)) == expected_turns(StartCounts(2, 5))


def test_expected_turns_matches_dp_grid():
    for i1 in range(1, 13):
        for i2 in range(i1, 13):
            assert expected_turns(StartCounts(i1, i2)) == expected_turns_dp(i1, i2)


@pytest.mark.parametrize("start", [(1, 1), (2, 3), (4, 4), (3, 7)])
def test_expected_turns_matches_uncompressed_chain(start):
    turns, _ = raw_chain(*start)
    assert float(expected_turns(StartCounts(*start))) == pytest.approx(turns, rel=1e-12)


def test_start_counts_validation():
    with pytest.raises(ValueError):
        StartCounts(0, 3)
    assert StartCounts(4, 2).normalized() == StartCounts(2, 4)
