"""Seeded Monte Carlo engine for every game variant.

Runs are split into fixed-size batches. Batch ``b`` draws from its own PCG64
stream seeded by ``SeedSequence(seed, spawn_key=(b,))``, and batch tallies are
integers summed at the end, so a report depends only on ``(seed, config)`` and
never on how many threads executed the batches.

Each simulator is a vectorised transcription of the round-by-round game: both
players toss every round (double tails included), exactly as a literal loop
would.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from coin_duel.evolving import HazardGame, tie_prob_evolving_exact
from coin_duel.markov_oracle import BiasedGame, _as_fraction, tie_prob_dp
from coin_duel.exact_core import StartCounts
from coin_duel.multicoin import MulticoinGame, TieConvention

BATCH_SIZE = 10_000


@dataclass(frozen=True)
class SimConfig:
    runs: int
    seed: int
    game: BiasedGame | MulticoinGame | HazardGame

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SimReport:
    runs: int
    ties: int
    p1_wins: int
    p2_wins: int
    capped: int
    mean_turns: float
    seed: int
    mean_turns_stderr: float = 0.0

    def __post_init__(self):
        if self.ties + self.p1_wins + self.p2_wins + self.capped != self.runs:
            raise ValueError("tallies do not add up to the run count")

    @property
    def tie_rate(self) -> float:
        return self.ties / self.runs

    @property
    def tie_rate_stderr(self) -> float:
        r = self.tie_rate
        return math.sqrt(r * (1.0 - r) / self.runs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tie_rate"] = self.tie_rate
        d["tie_rate_stderr"] = self.tie_rate_stderr
        return d


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(batch,))))


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a sub-experiment (e.g. one grid cell) of a seeded sweep."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_batches(
    batch_fn: Callable[[np.random.Generator, int], np.ndarray],
    runs: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    sizes = [BATCH_SIZE] * (runs // BATCH_SIZE)
    if runs % BATCH_SIZE:
        sizes.append(runs % BATCH_SIZE)

    def work(b: int) -> np.ndarray:
        return batch_fn(batch_rng(seed, b), sizes[b])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(b) for b in range(len(sizes))]
    return np.sum(parts, axis=0, dtype=object)


def _report(tallies, runs: int, seed: int) -> SimReport:
    ties, p1, p2, capped, turns, turns_sq, played = (int(v) for v in tallies)
    mean = turns / played if played else 0.0
    stderr = 0.0
    if played > 1:
        # exact integer moments, so the variance has no cancellation error
        var = (turns_sq * played - turns * turns) / (played * (played - 1))
        stderr = math.sqrt(max(var, 0.0) / played)
    return SimReport(runs, ties, p1, p2, capped, mean, seed, stderr)


def _tallies(tie, p1, p2, capped, turns, played) -> np.ndarray:
    # ties, p1 wins, p2 wins, capped, sum and sum of squares of turns, games timed
    turns = turns[played].astype(object)
    return np.array(
        [
            int(np.count_nonzero(tie)),
            int(np.count_nonzero(p1)),
            int(np.count_nonzero(p2)),
            int(np.count_nonzero(capped)),
            int(turns.sum()) if len(turns) else 0,
            int((turns * turns).sum()) if len(turns) else 0,
            int(np.count_nonzero(played)),
        ],
        dtype=object,
    )


def _outcomes(a: np.ndarray, b: np.ndarray, turns: np.ndarray) -> np.ndarray:
    tie = (a == 0) & (b == 0)
    p1 = (b == 0) & (a > 0)
    p2 = (a == 0) & (b > 0)
    nothing = np.zeros(len(a), dtype=bool)
    return _tallies(tie, p1, p2, nothing, turns, np.ones(len(a), dtype=bool))


def _standard_batch(i1: int, i2: int, p: float):
    def batch(rng: np.random.Generator, size: int) -> np.ndarray:
        a = np.full(size, i1, dtype=np.int64)
        b = np.full(size, i2, dtype=np.int64)
        turns = np.zeros(size, dtype=np.int64)
        live = np.arange(size)
        while live.size:
            u = rng.random((live.size, 2))
            a[live] -= u[:, 0] < p
            b[live] -= u[:, 1] < p
            turns[live] += 1
            live = live[(a[live] > 0) & (b[live] > 0)]
        return _outcomes(a, b, turns)

    return batch


def simulate_standard(config: SimConfig, threads: int = 1) -> SimReport:
    """Raw-turn simulation of the two-player game with a common head probability."""
    game = config.game
    if not isinstance(game, BiasedGame):
        raise TypeError("simulate_standard needs a BiasedGame")
    fn = _standard_batch(game.start.i1, game.start.i2, float(game.p_heads))
    return _report(_run_batches(fn, config.runs, config.seed, threads), config.runs, config.seed)


def _walk(rng, size: int, coins: np.ndarray, target: int, floor: int, horizon: int, legacy: bool):
    """Round at which each walk first reaches ``target``; 0 marks a capped walk.

    ``legacy`` keeps a running round total that is never reset between rounds,
    so every round adds the prefix sum of all increments so far.
    """
    total = np.zeros(size, dtype=np.int64)
    carry = np.zeros(size, dtype=np.int64)
    count = np.zeros(size, dtype=np.int64)
    live = np.arange(size)
    for n in range(1, horizon + 1):
        if not live.size:
            break
        heads = rng.integers(0, 2, size=(live.size, len(coins)), dtype=np.int64)
        step = heads @ coins
        if legacy:
            carry[live] += step
            step = carry[live]
        total[live] += step
        now = total[live]
        done = now >= target
        count[live[done]] = n
        live = live[~done & (now >= floor)]
    return count


def _multicoin_batch(game: MulticoinGame, convention: TieConvention, legacy: bool):
    coins = np.array(game.coins.values, dtype=np.int64)

    def batch(rng: np.random.Generator, size: int) -> np.ndarray:
        n1 = _walk(rng, size, coins, game.target, game.floor, game.horizon, legacy)
        n2 = _walk(rng, size, coins, game.target, game.floor, game.horizon, legacy)
        resolved = (n1 > 0) & (n2 > 0)
        tie = resolved & (n1 == n2)
        if convention is TieConvention.INCLUDE_CAPPED:
            tie |= (n1 == 0) & (n2 == 0)
        # the player whose walk ends first is the one who dies
        p1 = resolved & (n1 > n2)
        p2 = resolved & (n2 > n1)
        capped = ~resolved & ~tie
        return _tallies(tie, p1, p2, capped, np.minimum(n1, n2), resolved)

    return batch


def simulate_multicoin(
    config: SimConfig,
    convention: TieConvention | str = TieConvention.EXCLUDE_CAPPED,
    legacy: bool = False,
    threads: int = 1,
) -> SimReport:
    """Two independent running-total walks per run; a tie is equal finishing rounds.

    Runs where either walk is capped (below the floor or past the horizon) are
    tallied as ``capped``, unless ``include_capped`` turns a double cap into a tie.
    ``mean_turns`` averages the shorter walk over runs where both walks finish.
    """
    game = config.game
    if not isinstance(game, MulticoinGame):
        raise TypeError("simulate_multicoin needs a MulticoinGame")
    fn = _multicoin_batch(game, TieConvention(convention), legacy)
    return _report(_run_batches(fn, config.runs, config.seed, threads), config.runs, config.seed)


def _evolving_batch(n: int, lam: float):
    def batch(rng: np.random.Generator, size: int) -> np.ndarray:
        a = np.full(size, n, dtype=np.int64)
        b = np.full(size, n, dtype=np.int64)
        turns = np.zeros(size, dtype=np.int64)
        live = np.arange(size)
        while live.size:
            pa = -np.expm1(-lam * (n - a[live] + 1))
            pb = -np.expm1(-lam * (n - b[live] + 1))
            u = rng.random((live.size, 2))
            a[live] -= u[:, 0] < pa
            b[live] -= u[:, 1] < pb
            turns[live] += 1
            live = live[(a[live] > 0) & (b[live] > 0)]
        return _outcomes(a, b, turns)

    return batch


def simulate_evolving(config: SimConfig, threads: int = 1) -> SimReport:
    """Exponential-hazard game with two fresh uniforms per round."""
    game = config.game
    if not isinstance(game, HazardGame) or game.schedule is not None:
        raise TypeError("simulate_evolving needs a HazardGame without a schedule override")
    fn = _evolving_batch(game.n, game.lam)
    return _report(_run_batches(fn, config.runs, config.seed, threads), config.runs, config.seed)


@dataclass(frozen=True)
class CurvePoint:
    x: float
    tie_rate: float
    stderr: float
    exact: float | None
    seed: int


def tie_curve_vs_p(
    k: int,
    p_grid: Sequence[float],
    runs: int,
    seed: int,
    threads: int = 1,
    exact: bool = True,
) -> list[CurvePoint]:
    """Tie rate of the symmetric ``k``-vs-``k`` game across head probabilities."""
    points = []
    for idx, p in enumerate(p_grid):
        cell_seed = derive_seed(seed, k, idx)
        game = BiasedGame(StartCounts(k, k), _as_fraction(p))
        rep = simulate_standard(SimConfig(runs, cell_seed, game), threads)
        ref = float(tie_prob_dp(k, k, game.p_heads)) if exact else None
        points.append(CurvePoint(float(p), rep.tie_rate, rep.tie_rate_stderr, ref, cell_seed))
    return sorted(points, key=lambda pt: pt.x)


@dataclass(frozen=True)
class GridCell:
    n: int
    lam: float
    tie_rate: float
    stderr: float
    exact: float | None
    seed: int


def evolving_grid(
    n_grid: Sequence[int],
    lambda_grid: Sequence[float],
    runs: int,
    seed: int,
    threads: int = 1,
    exact: bool = False,
) -> list[GridCell]:
    """Simulated tie rate on every ``(n, lambda)`` cell, each with its own derived seed."""
    cells = []
    for i, n in enumerate(n_grid):
        for j, lam in enumerate(lambda_grid):
            cell_seed = derive_seed(seed, i, j)
            game = HazardGame(int(n), float(lam))
            rep = simulate_evolving(SimConfig(runs, cell_seed, game), threads)
            ref = tie_prob_evolving_exact(game) if exact else None
            cells.append(GridCell(int(n), float(lam), rep.tie_rate, rep.tie_rate_stderr, ref, cell_seed))
    return cells
