"""
Comparative statics of the barrier and the value function.

Sweeps re-solve the model along a grid of one parameter and check the trends
that are known to hold. Trends that are only conjectured, and the split
behaviour of roots under the jump intensities, are recorded with
asserted=False and never fail a report.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import ValidationError
from .model import JumpMix, ModelParams, validate
from .roots import root_sensitivity
from .solver import BarrierSolution, solve
from .value import StatePoint, value

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-10
CONSTANT_TOLERANCE = 1e-12

SWEEPABLE = ("mu", "sigma", "lambda_n", "lambda_p", "alpha")

# (trend, asserted)
BSTAR_TRENDS = {
    "mu": ("increasing", True),
    "sigma": ("increasing", True),
    "lambda_n": ("decreasing", True),
    "lambda_p": ("increasing", False),
    "alpha": ("constant", True),
}
VALUE_TRENDS = {
    "mu": ("nondecreasing", True),
    "sigma": ("nondecreasing", True),
    "lambda_n": ("nonincreasing", True),
    "lambda_p": ("nondecreasing", True),
    "alpha": ("nonincreasing", False),
}
# side -> trend; None marks a side whose roots split into two groups
ROOT_TRENDS = {
    "mu": {"pos": "decreasing", "neg": "decreasing"},
    "sigma": {"pos": "decreasing", "neg": "increasing"},
    "lambda_n": {"pos": "increasing", "neg": None},
    "lambda_p": {"pos": None, "neg": "decreasing"},
    "alpha": {"pos": "constant", "neg": "constant"},
}
# minimum (m_n, m_p) for a sweep of the parameter to stay valid
REQUIRED_SIDES = {"lambda_n": (1, 0), "lambda_p": (0, 1)}


@dataclass
class Verdict:
    name: str
    trend: str
    holds: bool
    asserted: bool
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "trend": self.trend,
            "holds": self.holds,
            "asserted": self.asserted,
            "note": self.note,
        }


@dataclass
class SweepReport:
    parameter: str
    grid: list[float]
    bstar: list[float] = field(default_factory=list)
    probes: list[tuple[float, float]] = field(default_factory=list)
    values: list[list[float]] = field(default_factory=list)
    roots: dict[str, list[list[float]]] = field(default_factory=dict)
    split_index: list[int] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.holds for v in self.verdicts if v.asserted)

    @property
    def failures(self) -> list[str]:
        return [f"{v.name} is not {v.trend}" for v in self.verdicts if v.asserted and not v.holds]

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameter": self.parameter,
            "grid": list(self.grid),
            "bstar": list(self.bstar),
            "probes": [list(p) for p in self.probes],
            "values": [list(v) for v in self.values],
            "roots": {side: [list(r) for r in rows] for side, rows in self.roots.items()},
            "split_index": list(self.split_index),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
            "failures": self.failures,
        }

    def to_rows(self) -> list[dict[str, Any]]:
        """Flat rows parameter,value,bstar,probe_x,probe_y,V (one per grid value and probe)."""
        rows = []
        for i, g in enumerate(self.grid):
            b = self.bstar[i] if self.bstar else None
            if not self.probes:
                rows.append({"parameter": self.parameter, "value": g, "bstar": b,
                             "probe_x": None, "probe_y": None, "V": None})
                continue
            for j, (x, y) in enumerate(self.probes):
                rows.append({"parameter": self.parameter, "value": g, "bstar": b,
                             "probe_x": x, "probe_y": y, "V": self.values[i][j]})
        return rows


def check_trend(series, trend: str, slack: float = MONOTONE_SLACK) -> bool:
    """Whether successive values follow `trend` (strict or weak, with relative slack)."""
    series = [float(s) for s in series]
    for a, b in zip(series, series[1:]):
        scale = max(abs(a), abs(b))
        if trend == "increasing" and not b > a:
            return False
        if trend == "decreasing" and not b < a:
            return False
        if trend == "nondecreasing" and b < a - slack * scale:
            return False
        if trend == "nonincreasing" and b > a + slack * scale:
            return False
        if trend == "constant" and abs(b - a) > CONSTANT_TOLERANCE * max(1.0, scale):
            return False
    return True


def _check_parameter(parameter: str) -> None:
    if parameter not in SWEEPABLE:
        raise ValidationError(f"Cannot sweep '{parameter}'; expected one of {', '.join(SWEEPABLE)}")


def _grid_params(base: ModelParams, parameter: str, grid) -> tuple[list[float], list[ModelParams]]:
    _check_parameter(parameter)
    grid = [float(g) for g in grid]
    if len(grid) < 2:
        raise ValidationError("A sweep needs at least two grid values")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"Sweep grid must be strictly increasing, got {grid}")
    return grid, [base.replace(**{parameter: g}) for g in grid]


def _solve_all(params_list: list[ModelParams], executor: Executor | None) -> list[BarrierSolution]:
    if executor is None:
        return [solve(p) for p in params_list]
    return list(executor.map(solve, params_list))


def default_grid(base: ModelParams, parameter: str, points: int = 5) -> list[float]:
    """points values spanning one order of magnitude around the base (additive ±0.2 for μ)."""
    _check_parameter(parameter)
    current = getattr(base, parameter)
    if parameter == "mu":
        return (current + np.linspace(-0.2, 0.2, points)).tolist()
    return (current * np.geomspace(10 ** -0.5, 10 ** 0.5, points)).tolist()


def sweep_bstar(base: ModelParams, parameter: str, grid, executor: Executor | None = None) -> SweepReport:
    grid, params_list = _grid_params(base, parameter, grid)
    solutions = _solve_all(params_list, executor)
    report = SweepReport(parameter=parameter, grid=grid, bstar=[s.bstar for s in solutions])
    trend, asserted = BSTAR_TRENDS[parameter]
    report.verdicts.append(Verdict(
        "bstar",
        trend,
        check_trend(report.bstar, trend),
        asserted,
        "" if asserted else "conjecture, reported only",
    ))
    if parameter == "alpha":
        K = np.array([s.K for s in solutions])
        same = bool(np.all(np.abs(K - K[0]) <= CONSTANT_TOLERANCE * np.maximum(1.0, np.abs(K[0]))))
        report.verdicts.append(Verdict("K", "constant", same, True))
    logger.info(f"bstar sweep over {parameter}: {report.bstar}")
    return report


def sweep_value(
    base: ModelParams,
    parameter: str,
    grid,
    probes,
    executor: Executor | None = None,
) -> SweepReport:
    probes = [StatePoint(float(x), float(y)) for x, y in probes]
    if not probes:
        raise ValidationError("sweep_value needs at least one probe point")
    grid, params_list = _grid_params(base, parameter, grid)
    solutions = _solve_all(params_list, executor)
    report = SweepReport(
        parameter=parameter,
        grid=grid,
        bstar=[s.bstar for s in solutions],
        probes=[(p.x, p.y) for p in probes],
        values=[[value(s, p) for p in probes] for s in solutions],
    )
    trend, asserted = VALUE_TRENDS[parameter]
    for j, p in enumerate(probes):
        series = [row[j] for row in report.values]
        report.verdicts.append(Verdict(
            f"V({p.x!r}, {p.y!r})",
            trend,
            check_trend(series, trend),
            asserted,
        ))
    return report


def _split_index(slopes: list[float]) -> int:
    """Number of leading (smallest) roots moving down before the first one moving up."""
    count = 0
    for s in slopes:
        if s >= 0.0:
            break
        count += 1
    return count


def sweep_roots(base: ModelParams, parameter: str, grid, executor: Executor | None = None) -> SweepReport:
    """
    Track every root along the grid.

    Unconditional trends are asserted per root. Sides that split (positive
    roots under λp, negative roots under λn) report the split index observed
    from the implicit root derivatives at each grid value.
    """
    grid, params_list = _grid_params(base, parameter, grid)
    solutions = _solve_all(params_list, executor)
    report = SweepReport(
        parameter=parameter,
        grid=grid,
        bstar=[s.bstar for s in solutions],
        roots={
            "pos": [list(s.roots.pos) for s in solutions],
            "neg": [list(s.roots.neg) for s in solutions],
        },
    )
    for side in ("pos", "neg"):
        trend = ROOT_TRENDS[parameter][side]
        rows = report.roots[side]
        if trend is None:
            for sol in solutions:
                slopes = root_sensitivity(sol.params, sol.roots, parameter)[side]
                if side == "neg":
                    slopes = [-s for s in reversed(slopes)]
                report.split_index.append(_split_index(slopes))
            steady = len(set(report.split_index)) <= 1
            report.verdicts.append(Verdict(
                f"{side} split index",
                "constant",
                steady,
                False,
                f"observed split index {report.split_index}",
            ))
            continue
        for j in range(len(rows[0])):
            series = [row[j] for row in rows]
            report.verdicts.append(Verdict(f"{side}[{j}]", trend, check_trend(series, trend), True))
    return report


def sensitivity_table(sol: BarrierSolution, parameter: str) -> dict[str, list[float]]:
    """Implicit dr/dθ of every root, reported next to a finite sweep."""
    _check_parameter(parameter)
    return root_sensitivity(sol.params, sol.roots, parameter)


def _random_mix(rng: np.random.Generator, m: int) -> JumpMix:
    if m == 0:
        return JumpMix()
    weights = rng.dirichlet(np.ones(m)) * 0.9 + 0.1 / m
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    rates = 0.5 + np.cumsum(rng.uniform(0.3, 2.0, size=m))
    return JumpMix(tuple(weights.tolist()), tuple(rates.tolist()))


def random_base_params(
    rng: np.random.Generator,
    m_max: int = 3,
    min_n: int = 0,
    min_p: int = 0,
) -> ModelParams:
    """Random validated parameter set with between min_* and m_max components per side."""
    m_n = int(rng.integers(min_n, m_max + 1))
    m_p = int(rng.integers(min_p, m_max + 1))
    return validate(ModelParams(
        mu=float(rng.uniform(-0.2, 0.2)),
        sigma=float(rng.uniform(0.2, 1.5)),
        rho=float(rng.uniform(0.05, 0.5)),
        alpha=float(rng.uniform(0.1, 2.0)),
        c=float(rng.uniform(0.1, 2.0)),
        lambda_n=float(rng.uniform(0.1, 1.5)) if m_n else 0.0,
        lambda_p=float(rng.uniform(0.1, 1.5)) if m_p else 0.0,
        mix_n=_random_mix(rng, m_n),
        mix_p=_random_mix(rng, m_p),
    ))
