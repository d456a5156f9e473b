"""Parameter sweeps of the barrier, the value function and the roots."""

from typing import Any

import numpy as np

from ..base import ExtractionBaseTool, PARAMS_SCHEMA, ToolResult
from ...core.sensitivity import (
    REQUIRED_SIDES,
    SWEEPABLE,
    default_grid,
    random_base_params,
    sensitivity_table,
    sweep_bstar,
    sweep_roots,
    sweep_value,
)

SWEEP_KINDS = ("bstar", "value", "roots")


class SweepTool(ExtractionBaseTool):
    """Tool to check the comparative statics along a parameter grid."""

    @property
    def name(self) -> str:
        return "extraction_sweep"

    @property
    def description(self) -> str:
        return (
            "Re-solve the model along a grid of one parameter (mu, sigma, lambda_n, lambda_p or "
            "alpha) and check the known trends: b* increasing in σ and μ, decreasing in λn, "
            "independent of α; V monotone in μ, σ, λn, λp at probe points; the direction in "
            "which each root moves. Conjectured trends are reported but never fail the sweep. "
            "Runs on one base parameter set or on random bases."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "params": PARAMS_SCHEMA,
                "parameter": {
                    "type": "string",
                    "description": "Parameter to sweep",
                    "enum": list(SWEEPABLE),
                },
                "grid": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": "Strictly increasing grid (default: 5 points spanning one order of magnitude)",
                },
                "probes": {
                    "description": "State points for the value sweep as [[x, y], ...] or 'x:y,x:y'",
                },
                "kinds": {
                    "type": "array",
                    "items": {"type": "string", "enum": list(SWEEP_KINDS)},
                    "description": "Sweeps to run (default: all; value needs probes)",
                },
                "random_bases": {
                    "type": "integer",
                    "description": "Sweep this many random base parameter sets instead of params",
                    "minimum": 1,
                },
                "m_max": {
                    "type": "integer",
                    "description": "Most mixture components per side for random bases (default: 3)",
                    "default": 3,
                },
                "seed": {
                    "type": "integer",
                    "description": "Seed for random bases (default: manager seed)",
                },
            },
            "required": ["parameter"]
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Run the sweeps."""
        parameter = input_data.get("parameter")
        random_bases = input_data.get("random_bases")
        if not parameter or (input_data.get("params") is None and not random_bases):
            return self._missing_parameter("parameter and one of params or random_bases are required")

        try:
            if random_bases:
                rng = np.random.default_rng(int(input_data.get("seed", self.manager.seed)))
                min_n, min_p = REQUIRED_SIDES.get(parameter, (0, 0))
                m_max = int(input_data.get("m_max", 3))
                bases = [
                    random_base_params(rng, m_max=m_max, min_n=min_n, min_p=min_p)
                    for _ in range(int(random_bases))
                ]
            else:
                bases = [self._params(input_data)]
            probes = self._points(input_data["probes"]) if input_data.get("probes") else []
            kinds = list(input_data.get("kinds") or SWEEP_KINDS)
            executor = self.manager.executor

            reports = []
            rows = []
            failures = []
            for index, base in enumerate(bases):
                grid = (
                    self._floats(input_data["grid"], "grid")
                    if input_data.get("grid") and not random_bases
                    else default_grid(base, parameter)
                )
                entry: dict[str, Any] = {"base": base.to_dict()}
                if "bstar" in kinds:
                    report = sweep_bstar(base, parameter, grid, executor)
                    entry["bstar"] = report.to_dict()
                    failures.extend(f"base {index}: {f}" for f in report.failures)
                    if not probes:
                        rows.extend(report.to_rows())
                if "value" in kinds and probes:
                    report = sweep_value(base, parameter, grid, [(p.x, p.y) for p in probes], executor)
                    entry["value"] = report.to_dict()
                    failures.extend(f"base {index}: {f}" for f in report.failures)
                    rows.extend(report.to_rows())
                if "roots" in kinds:
                    report = sweep_roots(base, parameter, grid, executor)
                    entry["roots"] = report.to_dict()
                    entry["root_slopes"] = sensitivity_table(self.manager.solve(base), parameter)
                    failures.extend(f"base {index}: {f}" for f in report.failures)
                reports.append(entry)

            return ToolResult(
                success=True,
                output={
                    "parameter": parameter,
                    "reports": reports,
                    "rows": rows,
                    "failures": failures,
                    "passed": not failures,
                }
            )

        except Exception as e:
            return self._failure(e)
