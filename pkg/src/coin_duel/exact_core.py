"""Closed-form tie probabilities and expected game length for the fair-coin game.

Everything here is exact rational arithmetic except :func:`tie_prob_truncated`,
which evaluates the infinite binomial series in floating point together with a
rigorous bound on the omitted tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

_LOG4 = math.log(4.0)


@dataclass(frozen=True)
class StartCounts:
    """Initial M&M counts for player 1 and player 2."""

    i1: int
    i2: int

    def __post_init__(self):
        if self.i1 < 1 or self.i2 < 1:
            raise ValueError(f"start counts must be >= 1, got ({self.i1}, {self.i2})")

    def normalized(self) -> StartCounts:
        """Swap so that ``i1 <= i2``; turn counts and tie odds are player-symmetric."""
        if self.i1 <= self.i2:
            return self
        return StartCounts(self.i2, self.i1)


def binomial(n: int, r: int) -> int:
    """C(n, r), zero outside ``0 <= r <= n``."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if r < 0 or r > n:
        return 0
    return math.comb(n, r)


def tie_prob_finite(k: int) -> Fraction:
    """Exact tie probability when both players start with ``k`` and toss fair coins.

    Uses the compressed game (double tails ignored), where each round is one
    of three equally likely moves; ``n`` counts the diagonal "both eat" moves.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    total = 0
    for n in range(k):
        ways = binomial(2 * k - n - 2, n) * binomial(2 * k - 2 * n - 2, k - n - 1)
        # common denominator 3^(2k-1)
        total += ways * 3**n
    return Fraction(total, 3 ** (2 * k - 1))


def _log_terms(k: int, n: np.ndarray) -> np.ndarray:
    # log of C(n-1, k-1)^2 / 4^n
    log_binom = gammaln(n) - gammaln(k) - gammaln(n - k + 1)
    return 2.0 * log_binom - n * _LOG4


def _term_ratio(k: int, n: int) -> float:
    # t_{n+1} / t_n, decreasing in n
    return (n / (n - k + 1)) ** 2 / 4.0


def tie_prob_partial(k: int, n_max: int) -> float:
    """Partial sum of ``C(n-1, k-1)^2 4^-n`` for ``n = k .. n_max``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n_max < k:
        return 0.0
    n = np.arange(k, n_max + 1, dtype=np.float64)
    return math.fsum(np.exp(_log_terms(k, n)))


@dataclass(frozen=True)
class TruncatedSum:
    value: float
    tail_bound: float
    last_index: int


def tie_prob_truncated(k: int, eps: float) -> TruncatedSum:
    """Evaluate the infinite-series tie probability to within ``eps``.

    Terms are summed in log space, so large ``k`` (1e5 and up) is fine. The
    sum stops at the first ``N`` where the term ratio from ``N+1`` on is at
    most 1/2 and the geometric tail ``t_{N+1} / (1 - r_{N+1})`` is below
    ``eps``. The ratio decreases in ``n``, so that tail bound is rigorous.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")

    # smallest n with ratio <= 1/2, i.e. n / (n - k + 1) <= sqrt(2)
    root2 = math.sqrt(2.0)
    n_half = max(k, math.ceil(root2 * (k - 1) / (root2 - 1)) - 1)
    while _term_ratio(k, n_half) > 0.5:
        n_half += 1

    parts = []
    start = k
    chunk = max(4096, k)
    while True:
        n = np.arange(start, start + chunk, dtype=np.float64)
        terms = np.exp(_log_terms(k, n))
        ratios = (n / (n - k + 1)) ** 2 / 4.0
        # tail starting at index j is bounded by t_j / (1 - r_j) once r_j <= 1/2
        with np.errstate(divide="ignore"):
            bounds = np.where(n >= n_half, terms / (1.0 - ratios), np.inf)
        hits = np.nonzero(bounds <= eps)[0]
        if len(hits):
            j = int(hits[0])
            parts.append(terms[:j])
            value = math.fsum(np.concatenate(parts))
            return TruncatedSum(value, float(bounds[j]), start + j - 1)
        parts.append(terms)
        start += chunk


def expected_turns(start: StartCounts) -> Fraction:
    """Exact expected number of raw turns (double-tail rounds included)."""
    s = start.normalized()
    i1, i2 = s.i1, s.i2

    def path_weight(length: int, diag: int, short: int) -> Fraction:
        # paths of `length` compressed moves with `diag` diagonal steps that
        # reach the short side's last row, weighted by length / 3^length
        if length - diag - 1 < 0:
            return Fraction(0)
        ways = binomial(length - 1, diag) * binomial(length - diag - 1, short - diag - 1)
        return Fraction(length * ways, 3**length)

    first = sum(
        (path_weight(m + i2 - k, k, i2) for m in range(i1) for k in range(m + 1)),
        Fraction(0),
    )
    second = sum(
        (path_weight(m + i1 - k, k, i1) for m in range(i2) for k in range(min(i1 - 1, m) + 1)),
        Fraction(0),
    )
    third = sum(
        (path_weight(i1 + i2 - k - 1, k, i1) for k in range(i1)),
        Fraction(0),
    )
    return Fraction(8, 3) * first + Fraction(8, 3) * second - Fraction(4, 3) * third
