"""
Characteristic function and its real roots.

p(r) = σ²r²/2 + μr − (ρ+λn+λp) + λp Σ ω^p β^p/(β^p − r) + λn Σ ω^n β^n/(r + β^n)

has exactly m_p+1 positive and m_n+1 negative roots, interlaced with the
mixture rates. Roots are isolated on the pole-free polynomial

Q(r) = p(r) · Π(β^p_i − r) · Π(β^n_j + r)

whose sign never degenerates near a pole, then polished with Newton.
"""

import logging
import math
import operator
from functools import reduce
from dataclasses import dataclass

import numpy as np
import sympy as sp
from numpy.polynomial import Polynomial

from ..exceptions import BracketFailureError, PoleHitError, ValidationError
from .model import ModelParams

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-14
BISECTION_WIDTH = 1e-13
NEWTON_MAX_ITER = 50
NEWTON_TOLERANCE = 1e-14
MAX_DOUBLINGS = 64
RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RootSet:
    """
    Real roots of the characteristic equation.

    pos is ascending (r_0 < ... < r_{m_p}); neg is ascending as well
    (r^n_{m_n} < ... < r^n_0), so neg[-1] is the root closest to zero.
    """

    pos: tuple[float, ...]
    neg: tuple[float, ...]
    residuals: tuple[float, ...]
    scale: float

    @property
    def neg_by_index(self) -> tuple[float, ...]:
        """Negative roots ordered r^n_0, r^n_1, ... (decreasing values)."""
        return tuple(reversed(self.neg))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.pos, dtype=float)

    def violations(self, params: ModelParams) -> list[str]:
        """Return a description of every broken RootSet invariant (empty when valid)."""
        problems = []
        if len(self.pos) != params.m_p + 1:
            problems.append(f"expected {params.m_p + 1} positive roots, got {len(self.pos)}")
        if len(self.neg) != params.m_n + 1:
            problems.append(f"expected {params.m_n + 1} negative roots, got {len(self.neg)}")
        if problems:
            return problems
        chain = [0.0]
        for r, b in zip(self.pos, (*params.mix_p.rates, math.inf)):
            chain.extend([r, b])
        if any(a >= b for a, b in zip(chain, chain[1:])):
            problems.append("positive roots do not interlace the positive-jump rates")
        chain = [0.0]
        for r, b in zip(self.neg_by_index, (*params.mix_n.rates, math.inf)):
            chain.extend([-r, b])
        if any(a >= b for a, b in zip(chain, chain[1:])):
            problems.append("negative roots do not interlace the negative-jump rates")
        worst = max(self.residuals) if self.residuals else 0.0
        if worst > RESIDUAL_TOLERANCE * self.scale:
            problems.append(f"residual {worst!r} exceeds {RESIDUAL_TOLERANCE} * scale {self.scale!r}")
        return problems


def residual_scale(params: ModelParams) -> float:
    return params.rho + params.lambda_n + params.lambda_p + params.sigma ** 2


def char_eval(params: ModelParams, r: float) -> float:
    """Rational form of p(r). Raises PoleHitError next to a pole."""
    for b in params.mix_p.rates:
        if abs(r - b) < POLE_TOLERANCE * b:
            raise PoleHitError(r, b)
    for b in params.mix_n.rates:
        if abs(r + b) < POLE_TOLERANCE * b:
            raise PoleHitError(r, -b)
    total = 0.5 * params.sigma ** 2 * r * r + params.mu * r - params.total_rate
    if params.lambda_p:
        total += params.lambda_p * math.fsum(
            w * b / (b - r) for w, b in zip(params.mix_p.weights, params.mix_p.rates)
        )
    if params.lambda_n:
        total += params.lambda_n * math.fsum(
            w * b / (r + b) for w, b in zip(params.mix_n.weights, params.mix_n.rates)
        )
    return total


def char_derivative(params: ModelParams, r: float) -> float:
    """p′(r) from the rational form."""
    total = params.sigma ** 2 * r + params.mu
    total += params.lambda_p * math.fsum(
        w * b / (b - r) ** 2 for w, b in zip(params.mix_p.weights, params.mix_p.rates)
    )
    total -= params.lambda_n * math.fsum(
        w * b / (r + b) ** 2 for w, b in zip(params.mix_n.weights, params.mix_n.rates)
    )
    return total


def char_eval_poly(params: ModelParams, r: float) -> float:
    """Q(r) in product form; finite everywhere, including at the poles."""
    bp, wp = params.mix_p.rates, params.mix_p.weights
    bn, wn = params.mix_n.rates, params.mix_n.weights
    pos_factors = [b - r for b in bp]
    neg_factors = [b + r for b in bn]
    P = math.prod(pos_factors)
    N = math.prod(neg_factors)
    quadratic = 0.5 * params.sigma ** 2 * r * r + params.mu * r - params.total_rate
    total = quadratic * P * N
    for i, (w, b) in enumerate(zip(wp, bp)):
        others = math.prod(f for k, f in enumerate(pos_factors) if k != i)
        total += params.lambda_p * w * b * others * N
    for j, (w, b) in enumerate(zip(wn, bn)):
        others = math.prod(f for k, f in enumerate(neg_factors) if k != j)
        total += params.lambda_n * w * b * others * P
    return total


def char_poly(params: ModelParams) -> Polynomial:
    """Monomial coefficients of Q, degree m_p + m_n + 2."""
    one = Polynomial([1.0])
    pos_factors = [Polynomial([b, -1.0]) for b in params.mix_p.rates]
    neg_factors = [Polynomial([b, 1.0]) for b in params.mix_n.rates]
    P = reduce(operator.mul, pos_factors, one)
    N = reduce(operator.mul, neg_factors, one)
    quadratic = Polynomial([-params.total_rate, params.mu, 0.5 * params.sigma ** 2])
    total = quadratic * P * N
    for i, (w, b) in enumerate(zip(params.mix_p.weights, params.mix_p.rates)):
        others = reduce(operator.mul, (f for k, f in enumerate(pos_factors) if k != i), one)
        total = total + params.lambda_p * w * b * others * N
    for j, (w, b) in enumerate(zip(params.mix_n.weights, params.mix_n.rates)):
        others = reduce(operator.mul, (f for k, f in enumerate(neg_factors) if k != j), one)
        total = total + params.lambda_n * w * b * others * P
    return total


def q_norm_at(poly: Polynomial, r: float) -> float:
    """Evaluation scale Σ|q_k||r|^k used to judge |Q(r)|."""
    return float(np.polynomial.polynomial.polyval(abs(r), np.abs(poly.coef)))


def companion_roots(params: ModelParams) -> tuple[list[float], list[float]]:
    """
    Independent root oracle.

    Q is expanded symbolically over exact rationals, then its roots are taken
    as companion-matrix eigenvalues. Returns (positive, negative), ascending.
    """
    r = sp.Symbol("r")

    def exact(value: float) -> sp.Rational:
        return sp.Rational(value)

    pos_factors = [exact(b) - r for b in params.mix_p.rates]
    neg_factors = [exact(b) + r for b in params.mix_n.rates]
    P = sp.Mul(*pos_factors)
    N = sp.Mul(*neg_factors)
    expr = (
        exact(params.sigma) ** 2 * r ** 2 / 2 + exact(params.mu) * r
        - (exact(params.rho) + exact(params.lambda_n) + exact(params.lambda_p))
    ) * P * N
    for i, (w, b) in enumerate(zip(params.mix_p.weights, params.mix_p.rates)):
        others = sp.Mul(*(f for k, f in enumerate(pos_factors) if k != i))
        expr += exact(params.lambda_p) * exact(w) * exact(b) * others * N
    for j, (w, b) in enumerate(zip(params.mix_n.weights, params.mix_n.rates)):
        others = sp.Mul(*(f for k, f in enumerate(neg_factors) if k != j))
        expr += exact(params.lambda_n) * exact(w) * exact(b) * others * P
    coefficients = [float(c) for c in sp.Poly(sp.expand(expr), r).all_coeffs()]
    eigen = np.roots(coefficients)
    real = sorted(
        float(z.real) for z in eigen if abs(z.imag) <= 1e-9 * max(1.0, abs(z))
    )
    return [z for z in real if z > 0.0], [z for z in real if z < 0.0]


def _sign(value: float) -> int:
    return (value > 0.0) - (value < 0.0)


def _expand_bracket(params: ModelParams, edge: float, direction: int) -> float:
    """Push the open end of the outermost bracket until Q changes sign."""
    target = _sign(char_eval_poly(params, edge))
    reach = abs(edge) + 1.0
    for _ in range(MAX_DOUBLINGS):
        candidate = direction * reach
        if _sign(char_eval_poly(params, candidate)) != target:
            return candidate
        reach *= 2.0
    raise BracketFailureError((edge, direction * reach))


def _isolate(params: ModelParams, lo: float, hi: float, dpoly: Polynomial) -> float:
    """Bisection on sign(Q) followed by a guarded Newton polish."""
    q_lo = char_eval_poly(params, lo)
    q_hi = char_eval_poly(params, hi)
    if q_hi == 0.0:
        return hi
    s_lo, s_hi = _sign(q_lo), _sign(q_hi)
    if s_lo == 0 or s_lo == s_hi:
        raise BracketFailureError((lo, hi))
    width = BISECTION_WIDTH * (hi - lo)
    a, b = lo, hi
    while b - a > width:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        s_mid = _sign(char_eval_poly(params, mid))
        if s_mid == 0:
            return mid
        if s_mid == s_lo:
            a = mid
        else:
            b = mid
    midpoint = 0.5 * (a + b)
    x = midpoint
    for iteration in range(NEWTON_MAX_ITER):
        slope = float(dpoly(x))
        if slope == 0.0 or not math.isfinite(slope):
            break
        step = char_eval_poly(params, x) / slope
        candidate = x - step
        if not (a <= candidate <= b):
            logger.warning(
                f"Newton left bracket [{a!r}, {b!r}] at iteration {iteration}; using midpoint"
            )
            return midpoint
        x = candidate
        if abs(step) <= NEWTON_TOLERANCE * abs(x):
            break
    return x


def solve_roots(params: ModelParams) -> RootSet:
    """
    Isolate every real root of p.

    Brackets are (0, β^p_1), (β^p_1, β^p_2), ..., (β^p_{m_p}, R+) on the positive
    side and the mirror image on the negative side.
    """
    dpoly = char_poly(params).deriv()

    edges = [0.0, *params.mix_p.rates]
    pos = [_isolate(params, lo, hi, dpoly) for lo, hi in zip(edges, edges[1:])]
    pos.append(_isolate(params, edges[-1], _expand_bracket(params, edges[-1], +1), dpoly))

    edges = [0.0, *(-b for b in params.mix_n.rates)]
    neg = [_isolate(params, hi, lo, dpoly) for lo, hi in zip(edges, edges[1:])]
    neg.append(_isolate(params, _expand_bracket(params, edges[-1], -1), edges[-1], dpoly))
    neg.sort()

    residuals = tuple(abs(char_eval(params, r)) for r in (*pos, *neg))
    roots = RootSet(tuple(pos), tuple(neg), residuals, residual_scale(params))
    logger.debug(f"Roots found: pos={roots.pos}, neg={roots.neg}, max residual={max(residuals)!r}")
    return roots


def char_partial(params: ModelParams, r: float, parameter: str) -> float:
    """∂p/∂θ at r for θ in {mu, sigma, rho, lambda_n, lambda_p, alpha}."""
    if parameter == "mu":
        return r
    if parameter == "sigma":
        return params.sigma * r * r
    if parameter == "rho":
        return -1.0
    if parameter == "alpha":
        return 0.0
    if parameter == "lambda_n":
        return math.fsum(-w * r / (r + b) for w, b in zip(params.mix_n.weights, params.mix_n.rates))
    if parameter == "lambda_p":
        return math.fsum(w * r / (b - r) for w, b in zip(params.mix_p.weights, params.mix_p.rates))
    raise ValidationError(f"Unknown parameter: {parameter}")


def root_sensitivity(params: ModelParams, roots: RootSet, parameter: str) -> dict[str, list[float]]:
    """Implicit derivatives dr/dθ = −(∂p/∂θ)/p′(r) of every root."""
    def slope(r):
        return -char_partial(params, r, parameter) / char_derivative(params, r)

    return {
        "pos": [slope(r) for r in roots.pos],
        "neg": [slope(r) for r in roots.neg],
    }
