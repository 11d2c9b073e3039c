"""Independent reference computations used only by the tests."""

import itertools

import numpy as np


def raw_chain(i1, i2, p=0.5):
    """Uncompressed game as an absorbing chain: states (a, b) with a, b >= 1.

    Returns (expected turns, tie probability) from the fundamental matrix,
    solved in floating point. Double-tail rounds are kept as self-loops.
    """
    states = [(a, b) for a in range(1, i1 + 1) for b in range(1, i2 + 1)]
    index = {s: n for n, s in enumerate(states)}
    q = 1 - p
    moves = [((1, 1), p * p), ((1, 0), p * q), ((0, 1), q * p), ((0, 0), q * q)]
    Q = np.zeros((len(states), len(states)))
    tie = np.zeros(len(states))
    for (a, b), n in index.items():
        for (da, db), w in moves:
            nxt = (a - da, b - db)
            if nxt in index:
                Q[n, index[nxt]] += w
            elif nxt == (0, 0):
                tie[n] += w
    A = np.eye(len(states)) - Q
    turns = np.linalg.solve(A, np.ones(len(states)))
    ties = np.linalg.solve(A, tie)
    start = index[(i1, i2)]
    return turns[start], ties[start]


def subset_sum_counts(values):
    counts = {}
    for bits in itertools.product((0, 1), repeat=len(values)):
        s = sum(b * v for b, v in zip(bits, values))
        counts[s] = counts.get(s, 0) + 1
    return counts


def convolved_depletion(probs, horizon):
    """P(N = t), t < horizon, for a sum of geometrics via explicit convolution."""
    t = np.arange(horizon)
    out = np.zeros(horizon)
    out[0] = 1.0
    for p in probs:
        geom = np.where(t >= 1, p * (1 - p) ** np.clip(t - 1, 0, None), 0.0)
        out = np.convolve(out, geom)[:horizon]
    return out
