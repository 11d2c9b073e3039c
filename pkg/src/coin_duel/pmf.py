"""Probability mass functions over the integers with an explicit residual bucket."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

Mass = Union[Fraction, float]


@dataclass(frozen=True)
class Pmf:
    """Masses on integer outcomes plus a ``residual`` for unresolved trajectories.

    Masses are either all :class:`~fractions.Fraction` (exact) or all ``float``.
    ``sum(masses) + residual`` is 1, exactly in the rational case.
    """

    masses: dict[int, Mass]
    residual: Mass = 0
    exact: bool = field(default=True, compare=False)

    def __post_init__(self):
        for x, m in self.masses.items():
            if m < 0:
                raise ValueError(f"negative mass {m} at outcome {x}")
        if self.residual < 0:
            # float round-off can push 1 - sum slightly below zero
            if self.exact or self.residual < -1e-12:
                raise ValueError(f"negative residual {self.residual}")

    def __getitem__(self, x: int) -> Mass:
        return self.masses.get(x, Fraction(0) if self.exact else 0.0)

    def __iter__(self) -> Iterator[tuple[int, Mass]]:
        return iter(sorted(self.masses.items()))

    def __len__(self) -> int:
        return len(self.masses)

    @property
    def support(self) -> list[int]:
        return sorted(self.masses)

    def total(self) -> Mass:
        if self.exact:
            return sum(self.masses.values(), Fraction(0)) + self.residual
        return math.fsum(list(self.masses.values()) + [self.residual])

    def mean(self) -> float:
        """Mean over the resolved support (residual ignored)."""
        return math.fsum(x * float(m) for x, m in self.masses.items())

    def sum_of_squares(self) -> float:
        """``sum_n p(n)^2``; the probability two independent draws coincide."""
        return math.fsum(float(m) ** 2 for m in self.masses.values())

    def nonzero(self) -> Pmf:
        return Pmf({x: m for x, m in self.masses.items() if m != 0}, self.residual, self.exact)
