"""Check the cofactor identities of the coefficient matrix."""

from typing import Any

import numpy as np

from ..base import ExtractionBaseTool, ToolResult
from ...core.cofactors import MAX_ORDER, cofactor_identity_suite, random_interlaced_instance
from ...exceptions import ValidationError


class CofactorsTool(ExtractionBaseTool):
    """Tool to verify the closed-form cofactors against direct determinants."""

    @property
    def name(self) -> str:
        return "extraction_cofactors"

    @property
    def description(self) -> str:
        return (
            "Verify the product formulas for the cofactors of the coefficient matrix "
            "against permutation-expansion determinants, either on one explicit "
            "interlaced configuration (roots, rates) or on random synthetic instances."
        )

    @property
    def input_schema(self) -> dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "roots": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": "n+1 positive roots interlaced with the rates (explicit mode)",
                },
                "rates": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": "n strictly increasing rates (explicit mode)",
                },
                "instances": {
                    "type": "integer",
                    "description": "Number of random instances (default: 100)",
                    "default": 100,
                    "minimum": 1,
                },
                "max_n": {
                    "type": "integer",
                    "description": f"Largest n drawn for random instances (default: 6, at most {MAX_ORDER})",
                    "default": 6,
                    "minimum": 1,
                    "maximum": MAX_ORDER,
                },
                "seed": {
                    "type": "integer",
                    "description": "Seed for random instances (default: manager seed)",
                },
                "tolerance": {
                    "type": "number",
                    "description": "Largest accepted relative residual (default: 1e-9)",
                    "default": 1e-9,
                },
            },
        }

    async def execute(self, input_data: dict[str, Any]) -> ToolResult:
        """Run the identity suite."""
        roots = input_data.get("roots")
        rates = input_data.get("rates")
        tolerance = float(input_data.get("tolerance", 1e-9))

        try:
            if roots is not None or rates is not None:
                if roots is None or rates is None:
                    return self._missing_parameter("roots and rates must be given together")
                instances = [(len(rates), roots, rates)]
            else:
                count = int(input_data.get("instances", 100))
                max_n = int(input_data.get("max_n", 6))
                if count < 1 or not 1 <= max_n <= MAX_ORDER:
                    raise ValidationError(f"instances must be >= 1 and max_n in [1, {MAX_ORDER}]")
                rng = np.random.default_rng(int(input_data.get("seed", self.manager.seed)))
                instances = []
                for _ in range(count):
                    n = int(rng.integers(1, max_n + 1))
                    instance_roots, instance_rates = random_interlaced_instance(rng, n)
                    instances.append((n, instance_roots, instance_rates))

            reports = [cofactor_identity_suite(n, r, b) for n, r, b in instances]
            worst: dict[str, float] = {}
            for report in reports:
                for name, residual in report.relative.items():
                    worst[name] = max(worst.get(name, 0.0), residual)

            return ToolResult(
                success=True,
                output={
                    "instances": len(reports),
                    "max_relative": worst,
                    "tolerance": tolerance,
                    "passed": all(report.passed(tolerance) for report in reports),
                    "rows": [
                        {"instance": i, "n": report.n, **report.relative}
                        for i, report in enumerate(reports)
                    ],
                }
            )

        except ValueError as e:
            return ToolResult(success=False, error=ValidationError(str(e)).to_dict())

        except Exception as e:
            return self._failure(e)
