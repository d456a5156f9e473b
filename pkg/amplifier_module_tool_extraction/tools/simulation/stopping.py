"""Monte Carlo estimate of the optimal stopping payoff."""

from typing import Any
from ..base import ExtractionBaseTool, PARAMS_SCHEMA, ToolResult
from .simulate import ROUNDING_SLACK, SIM_PROPERTIES, _overrides
from ...core.sim import mc_stopping
from ...core.value import directional_u


class StoppingTool(ExtractionBaseTool):
    """Tool to simulate the stopping problem whose value is u = αV_x + V_y."""

    @property
    def name(self) -> str:
        return "extraction_stopping"

    @property
    def description(self) -> str:
        return (
            "Simulate E[e^{−ρτ}(X_τ − c)] where τ is the first time the uncontrolled price, "
            "started at x0, reaches b* (by diffusion or by an upward jump), and compare it with "
            "the closed-form marginal value u(x0). Reports the fraction of hits that overshoot b* by a jump."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "params": PARAMS_SCHEMA,
                "x0": {"type": "number", "description": "Initial price"},
                "keep_samples": {
                    "type": "boolean",
                    "description": "Return the per-path payoffs (default: false)",
                    "default": False,
                },
                **SIM_PROPERTIES,
            },
            "required": ["params", "x0"]
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Run the simulation."""
        x0 = input_data.get("x0")
        if input_data.get("params") is None or x0 is None:
            return self._missing_parameter("params and x0 parameters are required")

        try:
            x0 = float(x0)
            params = self._params(input_data)
            solution = self.manager.solve(params)
            config = self.manager.path_config(params, _overrides(input_data))
            estimate = mc_stopping(
                params,
                x0,
                solution.bstar,
                config,
                executor=self.manager.executor,
                chunk_size=self.manager.chunk_size,
                keep_samples=bool(input_data.get("keep_samples", False)),
            )
            closed = directional_u(solution, x0)
            gap = abs(estimate.mean - closed)
            output = estimate.to_dict()
            output["bstar"] = solution.bstar
            within = gap <= 3.0 * estimate.stderr + ROUNDING_SLACK * max(1.0, abs(closed))
            output["oracle"] = {"u": closed, "gap": gap, "passed": within}
            output["rows"] = [{"x0": x0, "mean": estimate.mean, "stderr": estimate.stderr, "u": closed}]
            if estimate.samples is not None:
                output["samples"] = estimate.samples.tolist()
            output["passed"] = output["oracle"]["passed"]
            return ToolResult(success=True, output=output)

        except Exception as e:
            return self._failure(e)
