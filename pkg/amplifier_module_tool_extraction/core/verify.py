"""
HJB verification residuals.

Analytic residuals (gradient constraint T, H1 on PartialSell, H2 on FullSell,
Γu for the stopping problem) are checked against an independent quadrature of
the generator

    𝒟f = σ²f″/2 + μf′ − (ρ+λn+λp)f + λn ∫f(x−z)dPn(z) + λp ∫f(x+z)dPp(z).
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.integrate

from ..exceptions import QuadratureNonConvergenceError, ValidationError
from .roots import char_eval
from .solver import BarrierSolution
from .value import (
    StatePoint,
    d2u_dx2,
    d2Vdx2,
    directional_u,
    du_dx,
    dVdx,
    dVdy,
    value,
)

logger = logging.getLogger(__name__)

TAIL = -math.log(1e-16)
MAX_EVALUATIONS = 10 ** 6
H2_VARIANTS = ("direct", "sigma_squared", "sigma", "displayed")

DEFAULT_TOLERANCES = {
    "closed_form": 1e-9,
    "quadrature": 1e-7,
    "selling_gradient": 1e-12,
    "identity": 1e-10,
}


def residual_T(sol: BarrierSolution, pt: StatePoint) -> float:
    """Gradient constraint −α·v_x − v_y + x − c."""
    return -sol.params.alpha * dVdx(sol, pt) - dVdy(sol, pt) + pt.x - sol.params.c


def _jump_sums(sol: BarrierSolution):
    p = sol.params
    wn, bn = np.asarray(p.mix_n.weights), np.asarray(p.mix_n.rates)
    wp, bp = np.asarray(p.mix_p.weights), np.asarray(p.mix_p.rates)
    return wn, bn, wp, bp, np.asarray(sol.Xi_n)


def residual_H1(sol: BarrierSolution, x: float) -> float:
    """𝒟v on PartialSell; depends on x only."""
    if x < sol.bstar:
        raise ValidationError(f"residual_H1 needs x >= bstar, got {x!r}")
    p = sol.params
    wn, bn, wp, bp, xi = _jump_sums(sol)
    d = x - sol.bstar
    total = (
        0.5 * p.sigma ** 2
        + p.lambda_n * np.sum(wn / bn ** 2)
        + p.lambda_p * np.sum(wp / bp ** 2)
        + (x - p.c) * (p.mu - p.lambda_n * np.sum(wn / bn) + p.lambda_p * np.sum(wp / bp))
        - p.rho * (np.sum(sol.k / sol.r) + 0.5 * d * (x + sol.bstar - 2.0 * p.c))
        - p.lambda_n * np.sum(wn * xi / bn * np.exp(-bn * d))
    )
    return float(total) / p.alpha


def h1_derivative(sol: BarrierSolution, x: float) -> float:
    """H1′(x) = −(1/α)[λn Σ ωΞ(1 − e^{−β(x−b*)}) + ρ(x−b*) + σ²ℛ/2]."""
    p = sol.params
    wn, bn, _, _, xi = _jump_sums(sol)
    d = x - sol.bstar
    inner = (
        p.lambda_n * np.sum(wn * xi * -np.expm1(-bn * d))
        + p.rho * d
        + 0.5 * p.sigma ** 2 * sol.Rn
    )
    return -float(inner) / p.alpha


def residual_H2(sol: BarrierSolution, pt: StatePoint, variant: str = "sigma_squared") -> float:
    """
    𝒟v on FullSell.

    A downward jump from FullSell can land in PartialSell or Waiting, where v
    exceeds the immediate-sale value (s−c)y − αy²/2. Integrating that excess
    against β e^{−βz} gives Ξ_k·e^{−β(x−b*−αy)}(1 − e^{−αβy})/(αβ) per component.

    variant "direct" adds that correction to the FullSell terms. "sigma_squared"
    and "sigma" are the form simplified with the equ1 identity, carrying σ²ℛ/2
    or σℛ/2 respectively. "displayed" takes the jump term as
    −Ξ_k e^{−β(x−b*)}(1 − e^{−αβy})/(αβ); it does not match the generator and
    is reported for comparison only.
    """
    p = sol.params
    wn, bn, wp, bp, xi = _jump_sums(sol)
    x, y, a = pt.x, pt.y, p.alpha
    d = x - sol.bstar
    landed = np.exp(-bn * (d - a * y)) * -np.expm1(-a * bn * y) / (a * bn)
    if variant == "direct":
        total = (
            p.mu * y
            - p.rho * ((x - p.c) * y - 0.5 * a * y ** 2)
            + y * (p.lambda_p * np.sum(wp / bp) - p.lambda_n * np.sum(wn / bn))
            + p.lambda_n * np.sum(wn * xi * landed)
        )
    elif variant in ("sigma_squared", "sigma"):
        spread = p.sigma ** 2 if variant == "sigma_squared" else p.sigma
        total = (
            -p.rho * y * (d - 0.5 * a * y)
            - 0.5 * y * sol.Rn * spread
            - p.lambda_n * np.sum(wn * xi * (y - landed))
        )
    elif variant == "displayed":
        decay = -np.expm1(-a * bn * y) * np.exp(-bn * d)
        total = (
            p.mu * y
            - p.rho * ((x - p.c) * y - 0.5 * a * y ** 2)
            + y * (p.lambda_p * np.sum(wp / bp) - p.lambda_n * np.sum(wn / bn))
            - p.lambda_n / a * np.sum(wn * xi / bn * decay)
        )
    else:
        raise ValidationError(f"Unknown H2 variant: {variant}. Available: {', '.join(H2_VARIANTS)}")
    return float(total)


def residual_gamma_u(sol: BarrierSolution, x: float) -> float:
    """Γu: the generator applied to u, in closed form on each side of b*."""
    p = sol.params
    if x < sol.bstar:
        weights = np.array([char_eval(p, r) for r in sol.roots.pos])
        return math.fsum(sol.k * np.exp(sol.r * (x - sol.bstar)) * weights)
    wn, bn, wp, bp, xi = _jump_sums(sol)
    total = (
        p.mu
        - p.rho * (x - p.c)
        - p.lambda_n * np.sum(wn / bn)
        + p.lambda_p * np.sum(wp / bp)
        + p.lambda_n * np.sum(wn * xi * np.exp(-bn * (x - sol.bstar)))
    )
    return float(total)


def gamma_u_derivative(sol: BarrierSolution, x: float) -> float:
    """(Γu)′ on [b*, ∞): −ρ − λn Σ_k Σ_j ω_k r_j² K_j e^{−β_k(x−b*)}/(β_k + r_j)."""
    p = sol.params
    total = -p.rho
    for w, b in zip(p.mix_n.weights, p.mix_n.rates):
        total -= p.lambda_n * w * math.exp(-b * (x - sol.bstar)) * math.fsum(
            sol.r ** 2 * sol.k / (b + sol.r)
        )
    return total


@dataclass(frozen=True)
class GeneratorTarget:
    """A function of x with closed-form derivatives and its kink locations."""

    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Callable[[float], float]
    kinks: tuple[float, ...]


def value_section(sol: BarrierSolution, y: float) -> GeneratorTarget:
    def at(x):
        return StatePoint(x, y)

    return GeneratorTarget(
        f=lambda x: value(sol, at(x)),
        df=lambda x: dVdx(sol, at(x)),
        d2f=lambda x: d2Vdx2(sol, at(x)),
        kinks=(sol.bstar, sol.bstar + sol.params.alpha * y),
    )


def u_section(sol: BarrierSolution) -> GeneratorTarget:
    return GeneratorTarget(
        f=lambda x: directional_u(sol, x),
        df=lambda x: du_dx(sol, x),
        d2f=lambda x: d2u_dx2(sol, x),
        kinks=(sol.bstar,),
    )


def _jump_integral(target: GeneratorTarget, x: float, beta: float, sign: float,
                   epsabs: float, epsrel: float) -> tuple[float, int]:
    """∫_0^∞ f(x + sign·z) β e^{−βz} dz, split at the kinks and truncated in the tail."""
    z_max = TAIL / beta
    cuts = sorted({0.0, z_max, *(
        sign * (k - x) for k in target.kinks if 0.0 < sign * (k - x) < z_max
    )})

    def integrand(z):
        return target.f(x + sign * z) * beta * math.exp(-beta * z)

    total, evaluations = 0.0, 0
    for lo, hi in zip(cuts, cuts[1:]):
        result = scipy.integrate.quad(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200, full_output=1)
        total += result[0]
        evaluations += result[2]["neval"]
        if len(result) > 3:
            logger.debug(f"Quadrature on [{lo!r}, {hi!r}] reported: {result[3]}")
    return total, evaluations


def generator_quadrature(
    sol: BarrierSolution,
    target: GeneratorTarget,
    x: float,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    max_evaluations: int = MAX_EVALUATIONS,
) -> float:
    """𝒟f(x) with the jump integrals done by adaptive quadrature."""
    p = sol.params
    total = 0.5 * p.sigma ** 2 * target.d2f(x) + p.mu * target.df(x) - p.total_rate * target.f(x)
    evaluations = 0
    for intensity, mix, sign in ((p.lambda_n, p.mix_n, -1.0), (p.lambda_p, p.mix_p, 1.0)):
        for w, b in zip(mix.weights, mix.rates):
            integral, used = _jump_integral(target, x, b, sign, epsabs, epsrel)
            total += intensity * w * integral
            evaluations += used
            if evaluations > max_evaluations:
                raise QuadratureNonConvergenceError(evaluations, max_evaluations)
    return total


def near_offsets(levels: int = 20) -> list[float]:
    return [2.0 ** -k for k in range(1, levels + 1)]


@dataclass
class HjbReport:
    grid: dict
    max_T_waiting: float = -math.inf
    min_T_margin_waiting: float = math.inf
    max_abs_T_selling: float = 0.0
    max_H1: float = -math.inf
    h1_at_bstar: float = 0.0
    h1_decreasing: bool = True
    max_H2: float = -math.inf
    h2_variant: str = ""
    h2_discrepancy: dict[str, float] = field(default_factory=dict)
    max_abs_Dv_waiting: float = 0.0
    max_abs_gamma_u_waiting: float = 0.0
    gamma_u_at_bstar: float = 0.0
    gamma_u_expected: float = 0.0
    max_gamma_u_selling: float = -math.inf
    gamma_u_decreasing: bool = True
    max_generator_discrepancy: float = 0.0
    max_equation: float = -math.inf
    min_u_excess: float = math.inf
    u2_left: float = 0.0
    u2_right: float = 0.0
    passed: bool = False
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def run_hjb_suite(
    sol: BarrierSolution,
    y_values=(0.5, 1.0, 2.0),
    span: float = 5.0,
    far_points: int = 10,
    levels: int = 20,
    tolerances: dict | None = None,
) -> HjbReport:
    """
    Evaluate every HJB inequality on geometric grids around b*.

    Points sit at b* ± 2^{−k} (k = 1..levels) plus `far_points` uniform
    points out to distance `span` on each side.
    """
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    p = sol.params
    b = sol.bstar
    offsets = sorted(set(near_offsets(levels)) | set(np.linspace(0.5, span, far_points).tolist()))
    report = HjbReport(grid={
        "bstar": b,
        "offsets": offsets,
        "y_values": list(y_values),
        "span": span,
    })
    u_target = u_section(sol)
    quad_gap = 0.0

    # Waiting region, descending towards b*.
    for y in y_values:
        target = value_section(sol, y)
        for off in offsets:
            pt = StatePoint(b - off, y)
            t = residual_T(sol, pt)
            dv = generator_quadrature(sol, target, pt.x)
            report.max_T_waiting = max(report.max_T_waiting, t)
            report.min_T_margin_waiting = min(report.min_T_margin_waiting, -t)
            report.max_abs_Dv_waiting = max(report.max_abs_Dv_waiting, abs(dv))
            report.max_equation = max(report.max_equation, max(dv, t))
    for off in offsets:
        x = b - off
        g = residual_gamma_u(sol, x)
        report.max_abs_gamma_u_waiting = max(report.max_abs_gamma_u_waiting, abs(g))
        quad_gap = max(quad_gap, abs(generator_quadrature(sol, u_target, x) - g))
        report.min_u_excess = min(report.min_u_excess, directional_u(sol, x) - (x - p.c))

    # PartialSell: H1 is y-free, so pick y that keeps (x, y) inside the region.
    report.h1_at_bstar = residual_H1(sol, b)
    previous = report.h1_at_bstar
    for off in offsets:
        x = b + off
        h1 = residual_H1(sol, x)
        pt = StatePoint(x, off / p.alpha + 1.0)
        quad_gap = max(quad_gap, abs(generator_quadrature(sol, value_section(sol, pt.y), x) - h1))
        report.max_H1 = max(report.max_H1, h1)
        if not (h1 < previous and h1_derivative(sol, x) < 0.0):
            report.h1_decreasing = False
        previous = h1
        t = residual_T(sol, pt)
        report.max_abs_T_selling = max(report.max_abs_T_selling, abs(t) / max(1.0, abs(x)))
        report.max_equation = max(report.max_equation, max(h1, t))

    # FullSell: compare every H2 variant against quadrature.
    gaps = {variant: 0.0 for variant in H2_VARIANTS}
    h2_values = []
    for y in y_values:
        target = value_section(sol, y)
        for off in offsets:
            pt = StatePoint(p.alpha * y + b + off, y)
            dv = generator_quadrature(sol, target, pt.x)
            for variant in H2_VARIANTS:
                gaps[variant] = max(gaps[variant], abs(residual_H2(sol, pt, variant) - dv))
            h2_values.append((pt, dv))
            t = residual_T(sol, pt)
            report.max_abs_T_selling = max(report.max_abs_T_selling, abs(t) / max(1.0, abs(pt.x)))
            report.max_equation = max(report.max_equation, max(dv, t))
    report.h2_discrepancy = gaps
    simplified = min(("sigma_squared", "sigma"), key=lambda v: gaps[v])
    report.h2_variant = simplified
    quad_gap = max(quad_gap, gaps["direct"], gaps[simplified])
    report.max_H2 = max(residual_H2(sol, pt, simplified) for pt, _ in h2_values)

    # Stopping problem above b*.
    report.gamma_u_at_bstar = residual_gamma_u(sol, b)
    report.gamma_u_expected = -0.5 * p.sigma ** 2 * sol.Rn
    previous = report.gamma_u_at_bstar
    for off in offsets:
        x = b + off
        g = residual_gamma_u(sol, x)
        quad_gap = max(quad_gap, abs(generator_quadrature(sol, u_target, x) - g))
        report.max_gamma_u_selling = max(report.max_gamma_u_selling, g)
        if not (g < previous and gamma_u_derivative(sol, x) < 0.0):
            report.gamma_u_decreasing = False
        previous = g
        report.min_u_excess = min(report.min_u_excess, -abs(directional_u(sol, x) - (x - p.c)))
    report.max_gamma_u_selling = max(report.max_gamma_u_selling, report.gamma_u_at_bstar)
    report.u2_left = d2u_dx2(sol, math.nextafter(b, -math.inf))
    report.u2_right = d2u_dx2(sol, b)
    report.max_generator_discrepancy = quad_gap

    checks = [
        (report.max_T_waiting <= tol["selling_gradient"], f"Tv on Waiting reaches {report.max_T_waiting!r}"),
        (report.max_abs_T_selling <= tol["selling_gradient"], f"|Tv| on selling region reaches {report.max_abs_T_selling!r}"),
        (abs(report.h1_at_bstar) <= tol["closed_form"], f"H1(b*) = {report.h1_at_bstar!r}"),
        (report.max_H1 < 0.0, f"H1 reaches {report.max_H1!r} beyond b*"),
        (report.h1_decreasing, "H1 is not strictly decreasing beyond b*"),
        (report.max_H2 < 0.0, f"H2 reaches {report.max_H2!r} on FullSell"),
        (gaps[simplified] <= tol["quadrature"], f"no simplified H2 matches quadrature: {gaps}"),
        (report.max_abs_Dv_waiting <= tol["quadrature"], f"|Dv| on Waiting reaches {report.max_abs_Dv_waiting!r}"),
        (report.max_abs_gamma_u_waiting <= tol["closed_form"], f"|Γu| below b* reaches {report.max_abs_gamma_u_waiting!r}"),
        (abs(report.gamma_u_at_bstar - report.gamma_u_expected) <= tol["closed_form"],
         f"Γu(b*+) = {report.gamma_u_at_bstar!r}, expected {report.gamma_u_expected!r}"),
        (report.max_gamma_u_selling < 0.0, f"Γu reaches {report.max_gamma_u_selling!r} above b*"),
        (report.gamma_u_decreasing, "Γu is not strictly decreasing above b*"),
        (report.max_generator_discrepancy <= tol["quadrature"],
         f"analytic and quadrature generators differ by {report.max_generator_discrepancy!r}"),
        (report.max_equation <= tol["quadrature"], f"max(Dv, Tv) reaches {report.max_equation!r}"),
        (report.min_u_excess >= -tol["identity"], f"u falls below x - c by {report.min_u_excess!r}"),
        (abs(report.u2_left - sol.Rn) <= tol["identity"] * max(1.0, sol.Rn) and report.u2_right == 0.0,
         f"u'' jump at b* is ({report.u2_left!r}, {report.u2_right!r}), expected ({sol.Rn!r}, 0)"),
    ]
    report.failures = [message for ok, message in checks if not ok]
    report.passed = not report.failures
    logger.info(f"HJB suite finished: passed={report.passed}, H2 variant={simplified}")
    return report
