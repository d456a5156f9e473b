"""Base class for extraction tools."""

import logging
from typing import Any, TYPE_CHECKING

if TYPE_CHECKING:
    from ..manager import ExtractionManager

from ..core.model import ModelParams
from ..core.solver import BarrierSolution
from ..core.value import StatePoint
from ..exceptions import ExtractionError, ValidationError

try:
    from amplifier_core import ToolResult
except ImportError:
    # Fallback for testing without amplifier-core
    class ToolResult:
        def __init__(self, success: bool, output: dict | None = None, error: dict | None = None):
            self.success = success
            self.output = output or {}
            self.error = error or {}

logger = logging.getLogger(__name__)

PARAMS_SCHEMA = {
    "description": (
        "Model parameters: an object {mu, sigma, rho, alpha, c, lambda_n, lambda_p, "
        "mix_n: [{w, beta}], mix_p: [{w, beta}]}, a JSON string or a path to a JSON file"
    ),
}
SOLUTION_SCHEMA = {
    "description": "A previously solved solution (output of the solve operation), object or file path",
}


class ExtractionBaseTool:
    """Base class for all extraction tools."""

    def __init__(self, manager: "ExtractionManager"):
        """
        Initialize the tool.

        Args:
            manager: The ExtractionManager instance
        """
        self.manager = manager

    @property
    def name(self) -> str:
        """Tool name - must be implemented by subclasses."""
        raise NotImplementedError

    @property
    def description(self) -> str:
        """Tool description - must be implemented by subclasses."""
        raise NotImplementedError

    @property
    def input_schema(self) -> dict[str, Any]:
        """JSON schema for tool input - must be implemented by subclasses."""
        raise NotImplementedError

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """
        Execute the tool - must be implemented by subclasses.

        Args:
            input_data: Input parameters matching the input_schema

        Returns:
            ToolResult with success status and output/error data
        """
        raise NotImplementedError

    def _missing_parameter(self, message: str) -> ToolResult:
        return ToolResult(
            success=False,
            error={
                "message": message,
                "code": "MISSING_PARAMETER"
            }
        )

    def _failure(self, e: Exception) -> ToolResult:
        """Map an exception raised during execution to a failed ToolResult."""
        if isinstance(e, ExtractionError):
            logger.debug(f"{self.name} failed: {e.code}: {e.message}")
            return ToolResult(success=False, error=e.to_dict())
        logger.error(f"Unexpected error in {self.name}: {e}")
        return ToolResult(
            success=False,
            error={
                "message": f"Unexpected error: {str(e)}",
                "code": "UNEXPECTED_ERROR"
            }
        )

    def _params(self, input_data: dict[str, Any]) -> ModelParams:
        return self.manager.load_params(input_data["params"])

    def _solution(self, input_data: dict[str, Any]) -> BarrierSolution:
        """A stored solution when one is given, otherwise solve the params."""
        if input_data.get("solution") is not None:
            return self.manager.load_solution(input_data["solution"])
        return self.manager.solve(self._params(input_data))

    @staticmethod
    def _has_model(input_data: dict[str, Any]) -> bool:
        return input_data.get("params") is not None or input_data.get("solution") is not None

    @staticmethod
    def _points(value: Any) -> list[StatePoint]:
        """
        Parse state points.

        Accepts [[x, y], ...], [{"x": .., "y": ..}, ...] or the inline form "x:y,x:y".
        """
        if isinstance(value, str):
            items = [part.split(":") for part in value.split(",") if part.strip()]
        else:
            items = list(value or [])
        points = []
        for item in items:
            try:
                if isinstance(item, dict):
                    x, y = item["x"], item["y"]
                else:
                    x, y = item
                points.append(StatePoint(float(x), float(y)))
            except (KeyError, TypeError, ValueError):
                raise ValidationError(f"Cannot read state point {item!r}; expected x:y")
        if not points:
            raise ValidationError("At least one state point is required")
        return points

    @staticmethod
    def _floats(value: Any, what: str) -> list[float]:
        """A list of floats from a list or the inline form "a,b,c"."""
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            raise ValidationError(f"{what} must be a list of numbers, got {value!r}")
