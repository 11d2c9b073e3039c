"""Power-law and Gompertz fits, plus Pearson correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares


@dataclass(frozen=True)
class FitResult:
    params: dict[str, float]
    residual_sum_squares: float
    converged: bool
    iterations: int
    gradient_norm: float = 0.0
    message: str = field(default="", compare=False)

    def __getitem__(self, name: str) -> float:
        return self.params[name]


def _pairs(points: Iterable[Sequence[float]]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray([(float(x), float(y)) for x, y in points], dtype=np.float64)
    if arr.ndim != 2 or len(arr) == 0:
        raise ValueError("expected a non-empty sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def powerlaw_fit(points: Iterable[Sequence[float]]) -> FitResult:
    """Ordinary least squares of ``log(p)`` on ``log(k)`` (natural logs).

    ``params`` holds ``intercept`` and ``slope``, so ``p ~ exp(intercept) * k**slope``.
    """
    k, p = _pairs(points)
    if len(k) < 2:
        raise ValueError("need at least two points")
    if np.any(p <= 0) or np.any(k <= 0):
        raise ValueError("power-law fit needs strictly positive k and p")
    x, y = np.log(k), np.log(p)
    xc, yc = x - x.mean(), y - y.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0:
        raise ValueError("all k values are equal")
    slope = float(np.dot(xc, yc)) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    return FitResult({"intercept": intercept, "slope": slope}, float(np.dot(resid, resid)), True, 1)


def powerlaw_predict(fit: FitResult, k: float) -> float:
    return math.exp(fit["intercept"]) * float(k) ** fit["slope"]


def gompertz(lam, L: float, g: float, lam0: float):
    """``L * exp(-g * exp(-lam0 * lam))``."""
    return L * np.exp(-g * np.exp(-lam0 * np.asarray(lam, dtype=np.float64)))


def _gompertz_jac(theta, lam):
    L, g, lam0 = theta
    inner = np.exp(-lam0 * lam)
    outer = np.exp(-g * inner)
    return np.column_stack([outer, -L * inner * outer, L * g * lam * inner * outer])


def gompertz_fit(
    points: Iterable[Sequence[float]],
    xtol: float = 1e-9,
    max_iterations: int = 500,
) -> FitResult:
    """Least-squares Gompertz fit, parameters ``L``, ``g`` and ``lambda0``.

    Starts from ``L = max(y)``, ``lambda0 = 1`` and the ``g`` that makes the
    curve pass through the point at the smallest lambda. Runs Levenberg-Marquardt
    until the parameter step drops below ``xtol`` or ``max_iterations`` is hit;
    hitting the cap is reported through ``converged`` rather than raised.
    """
    lam, y = _pairs(points)
    if len(lam) < 4:
        raise ValueError("need at least four points")
    order = np.argsort(lam, kind="stable")
    lam, y = lam[order], y[order]

    L0 = float(y.max())
    if L0 <= 0:
        raise ValueError("Gompertz fit needs some positive responses")
    ratio = min(max(y[0] / L0, 1e-12), 1.0)
    g0 = -math.log(ratio) * math.exp(lam[0])
    theta0 = np.array([L0, g0, 1.0])

    def resid(theta):
        return gompertz(lam, *theta) - y

    r0 = resid(theta0)
    if float(np.dot(r0, r0)) == 0.0:
        # the starting curve already interpolates the data
        return FitResult({"L": L0, "g": g0, "lambda0": 1.0}, 0.0, True, 0, 0.0, "exact start")

    sol = least_squares(
        resid,
        theta0,
        jac=lambda th: _gompertz_jac(th, lam),
        method="lm",
        xtol=xtol,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_iterations,
    )
    grad = float(np.linalg.norm(sol.jac.T @ sol.fun))
    L, g, lam0 = (float(v) for v in sol.x)
    return FitResult(
        {"L": L, "g": g, "lambda0": lam0},
        float(np.dot(sol.fun, sol.fun)),
        bool(sol.status > 0),
        int(sol.nfev),
        grad,
        sol.message,
    )


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample correlation coefficient; constant inputs are rejected."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d sequences of equal length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = float(np.dot(xc, xc)), float(np.dot(yc, yc))
    if sxx == 0 or syy == 0:
        raise ValueError("correlation is undefined for a constant sequence")
    r = float(np.dot(xc, yc)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))
