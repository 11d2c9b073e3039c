"""Exponential-hazard variant: the head probability rises as a player's stash shrinks.

With ``n`` M&M's and rate ``lam``, the head probability while holding ``m`` is
``1 - exp(-lam * (n - m + 1))``. Eating the ``i``-th M&M therefore waits a
Geometric(``p_i``) number of rounds with ``p_i = 1 - exp(-lam * i)``, and the
depletion time is the sum of ``n`` independent geometrics. Its distribution is
built by running one first-order recursion per geometric factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from coin_duel.pmf import Pmf

MAX_HORIZON = 1 << 24


def heads_probability(n: int, m: int, lam: float) -> float:
    """Head probability for a player who started with ``n`` and holds ``m``."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return -math.expm1(-lam * (n - m + 1))


@dataclass(frozen=True)
class HazardGame:
    """``n`` starting M&M's under rate ``lam``.

    ``schedule`` overrides the per-M&M head probabilities (``schedule[i-1]`` is
    used while eating the ``i``-th M&M); ``lam`` is then ignored.
    """

    n: int
    lam: float = 1.0
    schedule: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.schedule is None:
            if self.lam <= 0:
                raise ValueError(f"lambda must be positive, got {self.lam}")
        else:
            sched = tuple(float(p) for p in self.schedule)
            if len(sched) != self.n:
                raise ValueError(f"schedule has {len(sched)} entries, expected {self.n}")
            if any(not 0 < p <= 1 for p in sched):
                raise ValueError("schedule probabilities must lie in (0, 1]")
            object.__setattr__(self, "schedule", sched)

    def head_probabilities(self) -> np.ndarray:
        if self.schedule is not None:
            return np.array(self.schedule)
        i = np.arange(1, self.n + 1, dtype=np.float64)
        return -np.expm1(-self.lam * i)


def _depletion_array(probs: Sequence[float], horizon: int) -> np.ndarray:
    # f[t] = P(N = t) for t < horizon
    f = np.zeros(horizon)
    f[0] = 1.0
    for p in probs:
        # adding a Geom(p) waiting time: g[t] = p f[t-1] + (1 - p) g[t-1]
        f = lfilter([0.0, p], [1.0, -(1.0 - p)], f)
    return f


def _resolve(game: HazardGame, eps: float) -> np.ndarray:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    probs = game.head_probabilities()
    mean = float(np.sum(1.0 / probs))
    horizon = 64
    while horizon < 2 * mean:
        horizon *= 2
    while True:
        f = _depletion_array(probs, horizon)
        residual = 1.0 - math.fsum(f)
        if residual <= eps:
            return f
        if horizon >= MAX_HORIZON:
            raise ValueError(f"residual {residual:.3g} still above eps={eps} at horizon {horizon}")
        horizon *= 2


def depletion_time_pmf(game: HazardGame, eps: float = 1e-12) -> Pmf:
    """Distribution of the number of rounds a player needs to eat all ``n``.

    The horizon doubles until the unresolved mass is at most ``eps``.
    """
    f = _resolve(game, eps)
    masses = {t: float(v) for t, v in enumerate(f) if v > 0.0}
    return Pmf(masses, max(0.0, 1.0 - math.fsum(f)), exact=False)


def tie_prob_evolving_exact(game: HazardGame, eps: float = 1e-12) -> float:
    """Tie probability for two independent players, accurate to ``2 * eps``."""
    f = _resolve(game, eps)
    return math.fsum(f * f)


def tie_prob_single(lam: float) -> float:
    """Closed form for ``n = 1``: ``p / (2 - p)`` with ``p = 1 - exp(-lam)``."""
    p = -math.expm1(-lam)
    return p / (2.0 - p)
