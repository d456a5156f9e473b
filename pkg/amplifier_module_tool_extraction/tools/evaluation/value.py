"""Evaluate the closed-form value function."""

from typing import Any
from ..base import ExtractionBaseTool, PARAMS_SCHEMA, SOLUTION_SCHEMA, ToolResult
from ...core.value import (
    classify,
    d2Vdx2,
    dVdx,
    dVdy,
    directional_u,
    growth_bound_check,
    limit_alpha,
    value,
    value_high_precision,
)


class ValueTool(ExtractionBaseTool):
    """Tool to evaluate V, its derivatives and u at state points."""

    @property
    def name(self) -> str:
        return "extraction_value"

    @property
    def description(self) -> str:
        return (
            "Evaluate the value function V(x, y) of the optimal barrier strategy at state points "
            "(price x, inventory y), with the region of each point, the derivatives V_x, V_y, V_xx "
            "and the marginal value u = αV_x + V_y. Optionally adds a 50-digit re-evaluation, "
            "the growth-bound check and the value along a sequence of price impacts α."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "params": PARAMS_SCHEMA,
                "solution": SOLUTION_SCHEMA,
                "points": {
                    "description": "State points as [[x, y], ...] or the inline form 'x:y,x:y'",
                },
                "high_precision": {
                    "type": "boolean",
                    "description": "Add a 50-digit re-evaluation of every value (default: false)",
                    "default": False,
                },
                "growth": {
                    "type": "boolean",
                    "description": "Check V <= K̄ y(1+y)(1+|x|) over the points (default: false)",
                    "default": False,
                },
                "alphas": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": "Price impacts at which to re-evaluate every point (α-limits)",
                },
            },
            "required": ["points"]
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Evaluate every point."""
        if not self._has_model(input_data) or input_data.get("points") is None:
            return self._missing_parameter("points and one of params or solution are required")

        try:
            solution = self._solution(input_data)
            points = self._points(input_data["points"])
            rows = []
            for pt in points:
                row = {
                    "x": pt.x,
                    "y": pt.y,
                    "region": classify(solution, pt).value,
                    "value": value(solution, pt),
                    "dvdx": dVdx(solution, pt),
                    "d2vdx2": d2Vdx2(solution, pt),
                    "dvdy": dVdy(solution, pt),
                    "u": directional_u(solution, pt.x),
                }
                if input_data.get("high_precision", False):
                    row["value_hp"] = value_high_precision(solution, pt)
                rows.append(row)

            output = {
                "bstar": solution.bstar,
                "points": rows,
                "rows": rows,
            }
            if input_data.get("growth", False):
                output["growth"] = growth_bound_check(
                    solution, [pt for pt in points if pt.y > 0.0]
                ).to_dict()
                output["passed"] = output["growth"]["holds"]
            if input_data.get("alphas"):
                alphas = self._floats(input_data["alphas"], "alphas")
                output["alpha_limits"] = [
                    {"x": pt.x, "y": pt.y, **limit_alpha(solution, pt, alphas).to_dict()}
                    for pt in points
                ]
            return ToolResult(success=True, output=output)

        except Exception as e:
            return self._failure(e)
