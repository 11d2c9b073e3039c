"""Multi-coin variant: each head adds its coin's (possibly negative) value.

Follows the cumulative-sum framing: a player's running total starts at 0 and
the player is done on the first round the total reaches ``target`` or more.
Walks that fall below ``floor`` or survive ``horizon`` rounds are never
resolved and land in the residual bucket.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from coin_duel.pmf import Pmf

MAX_ENUMERATED_COINS = 24


class TieConvention(str, enum.Enum):
    EXCLUDE_CAPPED = "exclude_capped"
    INCLUDE_CAPPED = "include_capped"


@dataclass(frozen=True)
class CoinSet:
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if not values:
            raise ValueError("a coin set needs at least one coin")
        if any(v == 0 for v in values):
            raise ValueError(f"coin values must be nonzero, got {values}")
        object.__setattr__(self, "values", values)

    @classmethod
    def parse(cls, text: str) -> CoinSet:
        return cls(tuple(int(v) for v in text.split(",") if v.strip()))

    def __len__(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values)

    @property
    def zero_sum(self) -> bool:
        return sum(self.values) == 0

    def dual(self) -> CoinSet:
        return dual(self)


@dataclass(frozen=True)
class MulticoinGame:
    coins: CoinSet
    target: int
    floor: int = -1000
    horizon: int | None = None

    def __post_init__(self):
        if self.target <= 0:
            raise ValueError(f"target must be positive, got {self.target}")
        if self.floor >= 0:
            raise ValueError(f"floor must be negative, got {self.floor}")
        if self.horizon is None:
            object.__setattr__(self, "horizon", 10 * self.target * len(self.coins))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    def dual(self) -> MulticoinGame:
        return MulticoinGame(dual(self.coins), self.target, self.floor, self.horizon)


def dual(coins: CoinSet) -> CoinSet:
    """The game with every coin value negated."""
    return CoinSet(tuple(-v for v in coins.values))


def increment_counts(coins: CoinSet) -> dict[int, int]:
    """Number of heads-subsets giving each round total; they sum to ``2**m``."""
    if len(coins) > MAX_ENUMERATED_COINS:
        raise ValueError(
            f"{len(coins)} coins exceeds the enumeration bound of {MAX_ENUMERATED_COINS}; "
            "use Monte Carlo instead"
        )
    counts = {0: 1}
    for a in coins.values:
        nxt = dict(counts)
        for s, c in counts.items():
            nxt[s + a] = nxt.get(s + a, 0) + c
        counts = nxt
    return dict(sorted(counts.items()))


def increment_pmf(coins: CoinSet) -> Pmf:
    """Exact distribution of one round's total over all ``2**m`` heads-subsets."""
    counts = increment_counts(coins)
    denom = 2 ** len(coins)
    return Pmf({s: Fraction(c, denom) for s, c in counts.items()}, Fraction(0))


@dataclass(frozen=True)
class DualityReport:
    zero_sum: bool
    pmf_equal: bool


def duality_check(coins: CoinSet) -> DualityReport:
    return DualityReport(
        zero_sum=coins.zero_sum,
        pmf_equal=increment_pmf(coins) == increment_pmf(dual(coins)),
    )


def _step(state: np.ndarray, weights: dict[int, int | float]):
    """Advance the live-state vector by one round.

    ``state[i]`` holds the (scaled) mass at running total ``floor + i``.
    Returns the new live vector, the mass reaching the target this round and
    the mass dropping below the floor.
    """
    width = len(state)
    nxt = np.zeros_like(state)
    done = lost = 0
    for x, w in weights.items():
        # index i moves to i + x; [0, width) stays live
        lo, hi = max(0, -x), min(width, width - x)
        if lo < hi:
            nxt[lo + x : hi + x] += state[lo:hi] * w
        if x > 0:
            done = done + state[max(0, width - x) :].sum() * w
        elif x < 0:
            lost = lost + state[: min(width, -x)].sum() * w
    return nxt, done, lost


def round_count_pmf(game: MulticoinGame, exact: bool = True) -> Pmf:
    """Distribution of the first round whose running total reaches ``game.target``.

    With ``exact=True`` the masses are rationals with denominator
    ``2**(m * n)`` (Python integers under the hood); otherwise float64. Mass
    below the floor or unresolved after ``horizon`` rounds becomes the residual.
    """
    counts = increment_counts(game.coins)
    m = len(game.coins)
    width = game.target - game.floor
    start = -game.floor

    if exact:
        state = np.zeros(width, dtype=object)
        state[start] = 1
        masses = {}
        lost = Fraction(0)
        for n in range(1, game.horizon + 1):
            state, done, dropped = _step(state, counts)
            denom = 2 ** (m * n)
            masses[n] = Fraction(int(done), denom)
            lost += Fraction(int(dropped), denom)
        live = Fraction(int(state.sum()), 2 ** (m * game.horizon))
        return Pmf(masses, live + lost, exact=True)

    weights = {x: c / 2**m for x, c in counts.items()}
    state = np.zeros(width)
    state[start] = 1.0
    masses = {}
    lost = 0.0
    for n in range(1, game.horizon + 1):
        state, done, dropped = _step(state, weights)
        masses[n] = float(done)
        lost += float(dropped)
    return Pmf(masses, float(state.sum()) + lost, exact=False)


def tie_prob_multicoin(
    game: MulticoinGame,
    convention: TieConvention | str = TieConvention.EXCLUDE_CAPPED,
    exact: bool = False,
) -> float:
    """Probability two independent walks finish on the same round.

    ``include_capped`` additionally counts two unresolved walks as a tie.
    """
    convention = TieConvention(convention)
    pmf = round_count_pmf(game, exact=exact)
    value = pmf.sum_of_squares()
    if convention is TieConvention.INCLUDE_CAPPED:
        value += float(pmf.residual) ** 2
    return value

