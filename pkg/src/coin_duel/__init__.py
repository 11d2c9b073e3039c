"""Exact and stochastic analysis of the M&M coin-elimination game."""

__version__ = "0.1.0"

from coin_duel.exact_core import (
    StartCounts,
    binomial,
    expected_turns,
    tie_prob_finite,
    tie_prob_truncated,
)
from coin_duel.markov_oracle import (
    OutcomeDist,
    compressed_transitions,
    expected_turns_dp,
    outcome_dist_dp,
    tie_prob_dp,
)
from coin_duel.pmf import Pmf

__all__ = [
    "OutcomeDist",
    "Pmf",
    "StartCounts",
    "binomial",
    "compressed_transitions",
    "expected_turns",
    "expected_turns_dp",
    "outcome_dist_dp",
    "tie_prob_dp",
    "tie_prob_finite",
    "tie_prob_truncated",
]
