"""Run the HJB verification suite."""

from typing import Any
from ..base import ExtractionBaseTool, PARAMS_SCHEMA, SOLUTION_SCHEMA, ToolResult
from ...core.verify import run_hjb_suite


class VerifyTool(ExtractionBaseTool):
    """Tool to check the HJB variational inequality around b*."""

    @property
    def name(self) -> str:
        return "extraction_verify"

    @property
    def description(self) -> str:
        return (
            "Verify that the value function solves the HJB variational inequality: generator and "
            "gradient-constraint residuals on geometric grids around b* in every region, the "
            "stopping-problem residual Γu, and agreement of the analytic residuals with a "
            "quadrature evaluation of the generator. Also reports the identity ledger."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "params": PARAMS_SCHEMA,
                "solution": SOLUTION_SCHEMA,
                "y_values": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": "Inventories at which the value sections are checked (default: [0.5, 1, 2])",
                },
                "span": {
                    "type": "number",
                    "description": "Farthest distance from b* on each side (default: 5)",
                    "default": 5.0,
                },
                "levels": {
                    "type": "integer",
                    "description": "Geometric offsets 2^-1 .. 2^-levels next to b* (default: 20)",
                    "default": 20,
                    "minimum": 1,
                },
                "far_points": {
                    "type": "integer",
                    "description": "Uniform points out to span on each side (default: 10)",
                    "default": 10,
                    "minimum": 1,
                },
            },
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Run the suite."""
        if not self._has_model(input_data):
            return self._missing_parameter("params or solution parameter is required")

        tol = self.manager.tolerances

        try:
            solution = self._solution(input_data)
            y_values = self._floats(input_data.get("y_values", [0.5, 1.0, 2.0]), "y_values")
            report = run_hjb_suite(
                solution,
                y_values=tuple(y_values),
                span=float(input_data.get("span", 5.0)),
                far_points=int(input_data.get("far_points", 10)),
                levels=int(input_data.get("levels", 20)),
                tolerances={
                    "closed_form": tol["closed_form_tol"],
                    "quadrature": tol["quadrature_tol"],
                    "identity": tol["identity_tol"],
                },
            )
            ledger_failures = solution.violations(tol["identity_tol"])
            output = report.to_dict()
            output["identity_residuals"] = dict(solution.identity_residuals)
            output["failures"] = output["failures"] + ledger_failures
            output["passed"] = report.passed and not ledger_failures
            output["rows"] = [{
                **{k: v for k, v in output.items() if isinstance(v, (bool, int, float, str))},
                "failure_count": len(output["failures"]),
            }]
            return ToolResult(success=True, output=output)

        except Exception as e:
            return self._failure(e)
