"""Solve for the optimal barrier and coefficients."""

from typing import Any
from ..base import ExtractionBaseTool, PARAMS_SCHEMA, ToolResult


class SolveTool(ExtractionBaseTool):
    """Tool to compute b*, K, the roots and the identity ledger."""

    @property
    def name(self) -> str:
        return "extraction_solve"

    @property
    def description(self) -> str:
        return (
            "Solve the extraction problem for a parameter set: the optimal selling barrier b*, "
            "the value-function coefficients K, the positive and negative roots of the "
            "characteristic equation, ℛ, ℳ, Ξ and the relative residual of every identity."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "params": PARAMS_SCHEMA,
                "tolerance": {
                    "type": "number",
                    "description": "Largest accepted identity residual (default: manager identity_tol)",
                },
            },
            "required": ["params"]
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Solve and report every invariant."""
        if input_data.get("params") is None:
            return self._missing_parameter("params parameter is required")

        tolerance = input_data.get("tolerance", self.manager.tolerances["identity_tol"])

        try:
            solution = self.manager.solve(self._params(input_data))
            violations = solution.violations(float(tolerance))
            output = solution.to_dict()
            output["violations"] = violations
            output["passed"] = not violations
            output["rows"] = [
                {"index": j, "r": r, "K": k}
                for j, (r, k) in enumerate(zip(solution.roots.pos, solution.K))
            ]
            return ToolResult(success=True, output=output)

        except Exception as e:
            return self._failure(e)
