"""
Closed-form value function of the barrier strategy at b*.

The (x, y) plane splits into three regions: Waiting (x < b*), PartialSell
(b* ≤ x < αy + b*) and FullSell (x ≥ αy + b*). Each has its own closed form;
derivatives and the directional derivative u = α·v_x + v_y follow from them.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import mpmath
import numpy as np

from ..exceptions import ValidationError
from .solver import BarrierSolution

logger = logging.getLogger(__name__)


class Region(str, Enum):
    WAITING = "Waiting"
    PARTIAL_SELL = "PartialSell"
    FULL_SELL = "FullSell"


@dataclass(frozen=True)
class StatePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y >= 0.0:
            raise ValidationError(f"Inventory must be non-negative, got y={self.y!r}")


def _one_minus_exp(z):
    """1 − e^{−z} without cancellation for small z."""
    return -np.expm1(-z)


def classify(sol: BarrierSolution, pt: StatePoint) -> Region:
    if pt.x < sol.bstar:
        return Region.WAITING
    if pt.x >= sol.params.alpha * pt.y + sol.bstar:
        return Region.FULL_SELL
    return Region.PARTIAL_SELL


def value(sol: BarrierSolution, pt: StatePoint) -> float:
    p = sol.params
    r, K, a = sol.r, sol.k, p.alpha
    d = pt.x - sol.bstar
    region = classify(sol, pt)
    if region is Region.WAITING:
        terms = K / (a * r) * _one_minus_exp(a * r * pt.y) * np.exp(r * d)
        return math.fsum(terms)
    if region is Region.PARTIAL_SELL:
        left = pt.y - d / a
        terms = K / (a * r) * _one_minus_exp(a * r * left)
        return math.fsum(terms) + d * (pt.x + sol.bstar - 2.0 * p.c) / (2.0 * a)
    return (pt.x - p.c) * pt.y - 0.5 * a * pt.y ** 2


def dVdx(sol: BarrierSolution, pt: StatePoint) -> float:
    p = sol.params
    r, K, a = sol.r, sol.k, p.alpha
    d = pt.x - sol.bstar
    region = classify(sol, pt)
    if region is Region.WAITING:
        return math.fsum(K / a * _one_minus_exp(a * r * pt.y) * np.exp(r * d))
    if region is Region.PARTIAL_SELL:
        return (pt.x - p.c) / a - math.fsum(K / a * np.exp(r * (d - a * pt.y)))
    return pt.y


def d2Vdx2(sol: BarrierSolution, pt: StatePoint) -> float:
    r, K, a = sol.r, sol.k, sol.params.alpha
    d = pt.x - sol.bstar
    region = classify(sol, pt)
    if region is Region.WAITING:
        return math.fsum(K * r / a * _one_minus_exp(a * r * pt.y) * np.exp(r * d))
    if region is Region.PARTIAL_SELL:
        return math.fsum(K * r / a * _one_minus_exp(-r * (d - a * pt.y)))
    return 0.0


def dVdy(sol: BarrierSolution, pt: StatePoint) -> float:
    p = sol.params
    r, K = sol.r, sol.k
    if classify(sol, pt) is Region.FULL_SELL:
        return pt.x - p.alpha * pt.y - p.c
    return math.fsum(K * np.exp(r * (pt.x - sol.bstar - p.alpha * pt.y)))


def directional_u(sol: BarrierSolution, x: float) -> float:
    """u(x) = α·v_x + v_y, a function of x alone."""
    if x >= sol.bstar:
        return x - sol.params.c
    return math.fsum(sol.k * np.exp(sol.r * (x - sol.bstar)))


def du_dx(sol: BarrierSolution, x: float) -> float:
    if x >= sol.bstar:
        return 1.0
    return math.fsum(sol.r * sol.k * np.exp(sol.r * (x - sol.bstar)))


def d2u_dx2(sol: BarrierSolution, x: float) -> float:
    """u″; the left limit at b* is Σ r²K = ℛ, the right limit is 0."""
    if x >= sol.bstar:
        return 0.0
    return math.fsum(sol.r ** 2 * sol.k * np.exp(sol.r * (x - sol.bstar)))


def value_high_precision(sol: BarrierSolution, pt: StatePoint, roots=None, digits: int = 50) -> float:
    """
    Re-evaluate the value function at `digits` significant digits.

    b* and K are recomputed from `roots` (defaults to the solution's roots) in
    multiprecision arithmetic before the closed form is evaluated.
    """
    p = sol.params
    roots = sol.roots.pos if roots is None else roots
    with mpmath.workdps(digits):
        r = [mpmath.mpf(v) for v in roots]
        beta = [mpmath.mpf(b) for b in p.mix_p.rates]
        c, a = mpmath.mpf(p.c), mpmath.mpf(p.alpha)
        x, y = mpmath.mpf(pt.x), mpmath.mpf(pt.y)
        bstar = c + mpmath.fsum(1 / v for v in r) - mpmath.fsum(1 / b for b in beta)
        size = len(r)
        A = mpmath.matrix(size, size)
        rhs = mpmath.matrix(size, 1)
        for j in range(size):
            A[0, j] = 1
        rhs[0] = bstar - c
        for i, b in enumerate(beta, start=1):
            for j in range(size):
                A[i, j] = b / (b - r[j])
            rhs[i] = bstar - c + 1 / b
        K = mpmath.lu_solve(A, rhs)
        d = x - bstar
        if x < bstar:
            total = mpmath.fsum(
                K[j] / (a * r[j]) * (1 - mpmath.exp(-a * r[j] * y)) * mpmath.exp(r[j] * d)
                for j in range(size)
            )
        elif x < a * y + bstar:
            left = y - d / a
            total = mpmath.fsum(
                K[j] / (a * r[j]) * (1 - mpmath.exp(-a * r[j] * left)) for j in range(size)
            ) + ((x - c) ** 2 - (bstar - c) ** 2) / (2 * a)
        else:
            total = (x - c) * y - a * y ** 2 / 2
        return float(total)


@dataclass
class GrowthReport:
    max_ratio: float
    constant: float
    min_value: float
    points: int

    @property
    def holds(self) -> bool:
        return self.max_ratio <= self.constant and self.min_value >= 0.0

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "constant": self.constant,
            "min_value": self.min_value,
            "points": self.points,
            "holds": self.holds,
        }


def growth_constant(sol: BarrierSolution) -> float:
    """max{K̄1, K̄2, K̄3} with K̄1 = b*−c, K̄2 = max{K̄1, α/2}, K̄3 = max{c, α/2}."""
    k1 = sol.bstar - sol.params.c
    k2 = max(k1, 0.5 * sol.params.alpha)
    k3 = max(sol.params.c, 0.5 * sol.params.alpha)
    return max(k1, k2, k3)


def growth_bound_check(sol: BarrierSolution, grid) -> GrowthReport:
    """Largest v/(y(1+y)(1+|x|)) and smallest v over points with y > 0."""
    max_ratio = -math.inf
    min_value = math.inf
    count = 0
    for pt in grid:
        if pt.y <= 0.0:
            raise ValidationError("growth_bound_check needs points with y > 0")
        v = value(sol, pt)
        max_ratio = max(max_ratio, v / (pt.y * (1.0 + pt.y) * (1.0 + abs(pt.x))))
        min_value = min(min_value, v)
        count += 1
    return GrowthReport(max_ratio, growth_constant(sol), min_value, count)


def limit_alpha_zero(sol: BarrierSolution, pt: StatePoint) -> float:
    """Pointwise α↓0 limit: y·Σ K e^{r(x−b*)} below b*, (x−c)y above."""
    if pt.x < sol.bstar:
        return pt.y * directional_u(sol, pt.x)
    return (pt.x - sol.params.c) * pt.y


@dataclass
class AlphaLimitReport:
    alphas: list[float]
    values: list[float]
    limit_small: float
    limit_large: float = 0.0

    def gaps(self) -> list[float]:
        return [abs(v - self.limit_small) for v in self.values]

    def to_dict(self) -> dict:
        return {
            "alphas": self.alphas,
            "values": self.values,
            "limit_small": self.limit_small,
            "limit_large": self.limit_large,
            "gaps": self.gaps(),
        }


def limit_alpha(sol: BarrierSolution, pt: StatePoint, alphas) -> AlphaLimitReport:
    """Evaluate the value along an α sequence; b* and K stay fixed."""
    alphas = [float(a) for a in alphas]
    values = [value(sol.with_alpha(a), pt) for a in alphas]
    logger.debug(f"Alpha sequence {alphas} gave values {values}")
    return AlphaLimitReport(alphas, values, limit_alpha_zero(sol, pt))
