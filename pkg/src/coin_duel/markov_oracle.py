"""Absorbing-chain dynamic programming over the lattice of remaining counts.

This is the brute-force oracle for the closed forms in :mod:`coin_duel.exact_core`
and extends them to biased coins and asymmetric starts. All tables hold exact
rationals; nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from coin_duel.exact_core import StartCounts


@dataclass(frozen=True)
class OutcomeDist:
    p1_wins: Fraction
    p2_wins: Fraction
    tie: Fraction

    def __post_init__(self):
        if self.p1_wins + self.p2_wins + self.tie != 1:
            raise ValueError("outcome probabilities must sum to 1")


def _as_fraction(p) -> Fraction:
    if isinstance(p, Rational):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p)
    # floats go through their shortest repr so 0.1 becomes 1/10, not 3602879701896397/2^55
    return Fraction(repr(float(p)))


@dataclass(frozen=True)
class BiasedGame:
    """Two players with the same per-toss head probability ``p_heads``."""

    start: StartCounts
    p_heads: Fraction = Fraction(1, 2)

    def __post_init__(self):
        p = _as_fraction(self.p_heads)
        if not 0 < p <= 1:
            raise ValueError(f"p_heads must lie in (0, 1], got {p}")
        object.__setattr__(self, "p_heads", p)

    def tie_prob(self) -> Fraction:
        return tie_prob_dp(self.start.i1, self.start.i2, self.p_heads)


def compressed_transitions(p_heads) -> tuple[Fraction, Fraction, Fraction]:
    """Move probabilities of the compressed game, conditioned on at least one head.

    Returns ``(both, only1, only2)`` with ``both = p / (1 + q)`` and
    ``only1 = only2 = q / (1 + q)``.
    """
    p = _as_fraction(p_heads)
    if not 0 < p <= 1:
        raise ValueError(f"p_heads must lie in (0, 1], got {p}")
    q = 1 - p
    return p / (1 + q), q / (1 + q), q / (1 + q)


def _check_counts(i1: int, i2: int) -> None:
    if i1 < 1 or i2 < 1:
        raise ValueError(f"start counts must be >= 1, got ({i1}, {i2})")


def _absorbing_table(i1: int, i2: int, p_heads, boundary):
    both, only1, only2 = compressed_transitions(p_heads)
    # table[i][j]: value from state (i, j); row 0 and column 0 are absorbing
    table = [[boundary(i, j) if i == 0 or j == 0 else None for j in range(i2 + 1)] for i in range(i1 + 1)]
    for i in range(1, i1 + 1):
        row, prev = table[i], table[i - 1]
        for j in range(1, i2 + 1):
            row[j] = both * prev[j - 1] + only1 * prev[j] + only2 * row[j - 1]
    return table[i1][i2]


def tie_prob_dp(i1: int, i2: int, p_heads) -> Fraction:
    """Exact probability both players empty on the same round."""
    _check_counts(i1, i2)
    return _absorbing_table(i1, i2, p_heads, lambda i, j: Fraction(int(i == 0 and j == 0)))


def outcome_dist_dp(i1: int, i2: int, p_heads) -> OutcomeDist:
    """Win/win/tie distribution; player 1 wins when player 2 empties first."""
    _check_counts(i1, i2)
    tie = tie_prob_dp(i1, i2, p_heads)
    p1 = _absorbing_table(i1, i2, p_heads, lambda i, j: Fraction(int(i > 0 and j == 0)))
    return OutcomeDist(p1_wins=p1, p2_wins=1 - p1 - tie, tie=tie)


def expected_turns_dp(i1: int, i2: int) -> Fraction:
    """Expected raw turns of the fair game.

    Counts compressed state changes by DP, then scales by 4/3, the mean wait
    for a round that is not double tails.
    """
    _check_counts(i1, i2)
    third = Fraction(1, 3)
    table = [[Fraction(0)] * (i2 + 1) for _ in range(i1 + 1)]
    for i in range(1, i1 + 1):
        row, prev = table[i], table[i - 1]
        for j in range(1, i2 + 1):
            row[j] = 1 + third * (prev[j - 1] + prev[j] + row[j - 1])
    return Fraction(4, 3) * table[i1][i2]
