from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from coin_duel.exact_core import binomial
from coin_duel.montecarlo import SimConfig, simulate_multicoin
from coin_duel.multicoin import (
    CoinSet,
    MulticoinGame,
    TieConvention,
    dual,
    duality_check,
    increment_pmf,
    round_count_pmf,
    tie_prob_multicoin,
)
from oracles import subset_sum_counts

nonzero = st.integers(-6, 6).filter(lambda v: v != 0)


def test_increment_pmf_five_three_two():
    pmf = increment_pmf(CoinSet((5, -3, -2)))
    assert pmf[0] == Fraction(1, 4)
    for v in (5, 3, 2, -2, -3, -5):
        assert pmf[v] == Fraction(1, 8)
    assert pmf.residual == 0


def test_increment_pmf_single_coin():
    assert increment_pmf(CoinSet((1,))).masses == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_increment_pmf_three_two_one():
    pmf = increment_pmf(CoinSet((3, -2, -1)))
    assert pmf[0] == Fraction(1, 4)
    for v in (3, -3, 1, -1, 2, -2):
        assert pmf[v] == Fraction(1, 8)


@settings(max_examples=80, deadline=None)
@given(st.lists(nonzero, min_size=1, max_size=10))
def test_increment_pmf_matches_enumeration_and_conserves_mass(values):
    coins = CoinSet(tuple(values))
    pmf = increment_pmf(coins)
    denom = 2 ** len(values)
    assert pmf.masses == {s: Fraction(c, denom) for s, c in subset_sum_counts(values).items()}
    assert pmf.total() == 1


def test_increment_pmf_rejects_too_many_coins():
    with pytest.raises(ValueError):
        increment_pmf(CoinSet(tuple([1] * 25)))


def test_coinset_rejects_zero_and_empty():
    with pytest.raises(ValueError):
        CoinSet((1, 0))
    with pytest.raises(ValueError):
        CoinSet(())


def test_dual_examples():
    assert dual(CoinSet((3, -2, -1))) == CoinSet((-3, 2, 1))
    assert dual(CoinSet((5, 2, -3, -4))) == CoinSet((-5, -2, 3, 4))
    c = CoinSet((1, 1, 1, 1, -2, -2))
    assert dual(dual(c)) == c


def test_duality_check_examples():
    r = duality_check(CoinSet((3, -2, -1)))
    assert r.zero_sum and r.pmf_equal
    r = duality_check(CoinSet((1, 1, 1, 1, -2, -2)))
    assert r.zero_sum and r.pmf_equal
    r = duality_check(CoinSet((1, 2)))
    assert not r.zero_sum and not r.pmf_equal


@settings(max_examples=100, deadline=None)
@given(st.lists(nonzero, min_size=1, max_size=7))
def test_zero_sum_sets_share_increment_law_with_dual(values):
    last = -sum(values)
    assume(last != 0)
    coins = CoinSet(tuple(values) + (last,))
    assert increment_pmf(coins) == increment_pmf(dual(coins))


def test_round_count_single_coin_is_geometric():
    game = MulticoinGame(CoinSet((1,)), target=1, horizon=40)
    pmf = round_count_pmf(game)
    for n in range(1, 41):
        assert pmf[n] == Fraction(1, 2**n)
    assert pmf.residual == Fraction(1, 2**40)


@pytest.mark.parametrize("k", [1, 3, 6])
def test_round_count_single_coin_is_negative_binomial(k):
    pmf = round_count_pmf(MulticoinGame(CoinSet((1,)), target=k, horizon=60))
    for n in range(1, 61):
        assert pmf[n] == Fraction(binomial(n - 1, k - 1), 2**n)


@pytest.mark.parametrize("values", [(3, -2, -1), (5, 2, -3, -4), (2, -1), (1, 1, -3)])
def test_round_count_conserves_mass_exactly(values):
    pmf = round_count_pmf(MulticoinGame(CoinSet(values), target=7, floor=-20, horizon=60))
    assert pmf.total() == 1
    assert pmf.residual > 0


def test_exact_and_float_paths_agree():
    game = MulticoinGame(CoinSet((3, -2, -1)), target=10)
    exact = round_count_pmf(game, exact=True)
    approx = round_count_pmf(game, exact=False)
    assert exact.support == approx.support
    for n, m in exact:
        assert float(m) == pytest.approx(approx[n], abs=1e-15)
    assert float(exact.residual) == pytest.approx(approx.residual, abs=1e-12)


def test_round_count_rejects_bad_horizon():
    with pytest.raises(ValueError):
        MulticoinGame(CoinSet((1,)), target=1, horizon=0)
    with pytest.raises(ValueError):
        MulticoinGame(CoinSet((1,)), target=0)


def test_default_horizon():
    assert MulticoinGame(CoinSet((3, -2, -1)), target=10).horizon == 300


def test_single_coin_tie_tends_to_one_third():
    game = MulticoinGame(CoinSet((1,)), target=1, horizon=60)
    assert tie_prob_multicoin(game) == pytest.approx(1 / 3, abs=1e-15)


def test_tie_conventions_differ_by_squared_residual():
    game = MulticoinGame(CoinSet((3, -2, -1)), target=10)
    pmf = round_count_pmf(game, exact=False)
    excl = tie_prob_multicoin(game, TieConvention.EXCLUDE_CAPPED)
    incl = tie_prob_multicoin(game, "include_capped")
    assert incl - excl == pytest.approx(pmf.residual**2, rel=1e-12)


@pytest.mark.parametrize("values", [(3, -2, -1), (5, 2, -3, -4), (1, 1, 1, 1, -2, -2)])
def test_dual_games_tie_equally(values):
    game = MulticoinGame(CoinSet(values), target=10)
    assert abs(tie_prob_multicoin(game) - tie_prob_multicoin(game.dual())) <= 1e-12


def test_longer_horizon_never_lowers_tie_probability():
    coins = CoinSet((5, 2, -3, -4))
    values = [tie_prob_multicoin(MulticoinGame(coins, 10, horizon=h)) for h in (10, 50, 200, 800)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_stated_game_tie_value_and_simulation():
    # frozen from the exact rational DP; a 200k-run simulation must agree
    game = MulticoinGame(CoinSet((3, -2, -1)), target=10)
    exact = tie_prob_multicoin(game, exact=True)
    assert exact == pytest.approx(0.0050361334, abs=1e-10)
    rep = simulate_multicoin(SimConfig(200_000, 11, game))
    assert abs(rep.tie_rate - exact) <= 4 * rep.tie_rate_stderr
