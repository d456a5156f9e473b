"""Unified extraction tool that consolidates all operations."""

import logging
from typing import Any, TYPE_CHECKING

if TYPE_CHECKING:
    from .manager import ExtractionManager

from .exceptions import ValidationError, ToolExecutionError

from .tools import (
    SolveTool,
    CofactorsTool,
    ValueTool,
    VerifyTool,
    SimulateTool,
    StoppingTool,
    SweepTool,
)

try:
    from amplifier_core import ToolResult
except ImportError:
    class ToolResult:
        def __init__(self, success: bool, output: dict | None = None, error: dict | None = None):
            self.success = success
            self.output = output or {}
            self.error = error or {}

logger = logging.getLogger(__name__)


class ExtractionUnifiedTool:
    """
    Unified tool that provides access to every extraction operation.

    The specific operation is selected by the 'operation' parameter; its
    inputs travel in 'parameters'.
    """

    def __init__(self, manager: "ExtractionManager"):
        """Initialize the unified tool with an extraction manager."""
        self.manager = manager

        self._tools = {
            "solve": SolveTool(manager),
            "cofactors": CofactorsTool(manager),
            "value": ValueTool(manager),
            "verify": VerifyTool(manager),
            "simulate": SimulateTool(manager),
            "stopping": StoppingTool(manager),
            "sweep": SweepTool(manager),
        }

    @property
    def name(self) -> str:
        """Tool name."""
        return "extraction"

    @property
    def description(self) -> str:
        """Tool description."""
        return (
            "Optimal extraction of a commodity whose price follows a jump-diffusion with "
            "hyper-exponential jumps and linear price impact. Computes the optimal selling "
            "barrier b* and the closed-form value function, verifies them against the HJB "
            "variational inequality and checks them by Monte Carlo.\n\n"
            "Operations:\n"
            "- solve: b*, coefficients, roots and identity residuals for a parameter set\n"
            "- cofactors: closed-form cofactor identities against direct determinants\n"
            "- value: V, its derivatives and u at state points (x, y)\n"
            "- verify: HJB inequality suite around b*\n"
            "- simulate: Monte Carlo profit of barrier strategies\n"
            "- stopping: Monte Carlo value of the associated stopping problem\n"
            "- sweep: comparative statics in mu, sigma, lambda_n, lambda_p, alpha\n\n"
            "Every operation that needs a model takes 'params' as an object "
            "{mu, sigma, rho, alpha, c, lambda_n, lambda_p, mix_n, mix_p}, a JSON string or a file path."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        """JSON schema for tool input."""
        return {
            "type": "object",
            "properties": {
                "operation": {
                    "type": "string",
                    "description": "The extraction operation to perform",
                    "enum": list(self._tools.keys()),
                },
                "parameters": {
                    "type": "object",
                    "description": "Parameters for the specific operation (schema varies by operation)",
                    "additionalProperties": True,
                },
            },
            "required": ["operation", "parameters"],
            "additionalProperties": False,
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """
        Execute an extraction operation.

        Args:
            input_data: Input with 'operation' and 'parameters' keys

        Returns:
            ToolResult with success status and output/error data
        """
        try:
            operation = input_data.get("operation")
            if not operation:
                error = ValidationError("Missing required field: operation")
                return ToolResult(success=False, error=error.to_dict())

            parameters = input_data.get("parameters", {})
            if not isinstance(parameters, dict):
                error = ValidationError("parameters must be an object")
                return ToolResult(success=False, error=error.to_dict())

            tool = self._tools.get(operation)
            if not tool:
                available = ", ".join(sorted(self._tools.keys()))
                error = ValidationError(
                    f"Unknown operation: {operation}. Available operations: {available}"
                )
                return ToolResult(success=False, error=error.to_dict())

            logger.debug(f"Executing extraction operation: {operation}")
            return await tool.execute(parameters)

        except Exception as e:
            logger.error(f"Unexpected error in extraction tool: {e}")
            error = ToolExecutionError("extraction", f"Unexpected error: {str(e)}")
            return ToolResult(success=False, error=error.to_dict())

    def get_operation_schema(self, operation: str) -> dict[str, Any] | None:
        """
        Get the input schema for a specific operation.

        Args:
            operation: The operation name

        Returns:
            Input schema dict or None if operation doesn't exist
        """
        tool = self._tools.get(operation)
        if tool:
            return tool.input_schema
        return None

    def list_operations(self) -> list[dict[str, str]]:
        """List all available operations with their descriptions, sorted by name."""
        return [
            {"operation": op_name, "description": tool.description}
            for op_name, tool in sorted(self._tools.items())
        ]
