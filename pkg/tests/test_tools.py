"""Tests for the extraction tools."""

import math
from unittest.mock import Mock

import pytest

from amplifier_module_tool_extraction.exceptions import ValidationError
from amplifier_module_tool_extraction.manager import DEFAULT_TOLERANCES, ExtractionManager
from amplifier_module_tool_extraction.tools import (
    CofactorsTool,
    ExtractionBaseTool,
    SimulateTool,
    SolveTool,
    StoppingTool,
    SweepTool,
    ValueTool,
    VerifyTool,
)

# Coarse grid for tool-level runs; accuracy is covered in test_sim.
FAST = {"paths": 200, "dt": 0.02, "horizon": 20.0, "bridge_max": True}


@pytest.fixture
def failing_manager():
    """Manager whose parameter loading fails validation."""
    manager = Mock(spec=ExtractionManager)
    manager.tolerances = dict(DEFAULT_TOLERANCES)
    manager.seed = 42
    manager.load_params.side_effect = ValidationError("Missing model parameters: mu")
    return manager


class TestBaseTool:
    """Tests for the shared input parsing."""

    def test_points_list(self):
        points = ExtractionBaseTool._points([[1.0, 2.0], {"x": 3, "y": 0.5}])
        assert [(p.x, p.y) for p in points] == [(1.0, 2.0), (3.0, 0.5)]

    def test_points_inline(self):
        points = ExtractionBaseTool._points("1:2, -3.5:0")
        assert [(p.x, p.y) for p in points] == [(1.0, 2.0), (-3.5, 0.0)]

    def test_points_bad(self):
        with pytest.raises(ValidationError, match="Cannot read state point"):
            ExtractionBaseTool._points("1:2,abc")

    def test_points_empty(self):
        with pytest.raises(ValidationError, match="At least one"):
            ExtractionBaseTool._points([])

    def test_points_negative_inventory(self):
        with pytest.raises(ValidationError, match="non-negative"):
            ExtractionBaseTool._points([[1.0, -1.0]])

    def test_floats(self):
        assert ExtractionBaseTool._floats("0.1, 0.2", "grid") == [0.1, 0.2]
        with pytest.raises(ValidationError, match="grid"):
            ExtractionBaseTool._floats(["a"], "grid")


class TestSolveTool:
    """Tests for SolveTool."""

    def test_tool_properties(self):
        tool = SolveTool(Mock())
        assert tool.name == "extraction_solve"
        assert "barrier" in tool.description.lower()
        assert tool.input_schema["required"] == ["params"]

    @pytest.mark.asyncio
    async def test_execute_without_params(self, manager):
        result = await SolveTool(manager).execute({})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_execute_p0(self, manager, p0_dict):
        result = await SolveTool(manager).execute({"params": p0_dict})
        assert result.success
        assert result.output["bstar"] == pytest.approx(2.0, abs=1e-12)
        assert result.output["K"] == [pytest.approx(1.0, rel=1e-12)]
        assert result.output["passed"] is True
        assert result.output["violations"] == []
        assert result.output["rows"][0]["index"] == 0

    @pytest.mark.asyncio
    async def test_execute_with_jumps(self, manager, p1_dict):
        result = await SolveTool(manager).execute({"params": p1_dict})
        assert result.success
        assert len(result.output["roots"]["pos"]) == 2
        assert len(result.output["roots"]["neg"]) == 2
        assert set(result.output["identity_residuals"]) >= {"equ1", "equ2", "equ3"}

    @pytest.mark.asyncio
    async def test_execute_invalid_params(self, manager, p1_dict):
        p1_dict["sigma"] = 0.0
        result = await SolveTool(manager).execute({"params": p1_dict})
        assert not result.success
        assert result.error["code"] == "NON_POSITIVE"

    @pytest.mark.asyncio
    async def test_validation_error_mapping(self, failing_manager):
        result = await SolveTool(failing_manager).execute({"params": {}})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"
        assert "Missing model parameters" in result.error["message"]

    @pytest.mark.asyncio
    async def test_unexpected_error(self, failing_manager):
        failing_manager.load_params.side_effect = RuntimeError("boom")
        result = await SolveTool(failing_manager).execute({"params": {}})
        assert not result.success
        assert result.error["code"] == "UNEXPECTED_ERROR"
        assert "boom" in result.error["message"]


class TestCofactorsTool:
    """Tests for CofactorsTool."""

    def test_tool_properties(self):
        tool = CofactorsTool(Mock())
        assert tool.name == "extraction_cofactors"
        assert "cofactor" in tool.description.lower()

    @pytest.mark.asyncio
    async def test_explicit_instance(self, manager):
        result = await CofactorsTool(manager).execute({"roots": [1.0, 5.0], "rates": [3.0]})
        assert result.success
        assert result.output["instances"] == 1
        assert result.output["passed"] is True

    @pytest.mark.asyncio
    async def test_random_instances(self, manager):
        result = await CofactorsTool(manager).execute({"instances": 5, "max_n": 3, "seed": 1})
        assert result.success
        assert result.output["passed"] is True
        assert len(result.output["rows"]) == 5
        assert all(1 <= row["n"] <= 3 for row in result.output["rows"])

    @pytest.mark.asyncio
    async def test_roots_without_rates(self, manager):
        result = await CofactorsTool(manager).execute({"roots": [1.0, 5.0]})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_length_mismatch(self, manager):
        result = await CofactorsTool(manager).execute({"roots": [1.0, 2.5], "rates": [2.0, 3.0, 4.0]})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"

    @pytest.mark.asyncio
    async def test_order_out_of_range(self, manager):
        result = await CofactorsTool(manager).execute({"instances": 2, "max_n": 20})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"


class TestValueTool:
    """Tests for ValueTool."""

    def test_tool_properties(self):
        tool = ValueTool(Mock())
        assert tool.name == "extraction_value"
        assert "points" in tool.input_schema["properties"]
        assert tool.input_schema["required"] == ["points"]

    @pytest.mark.asyncio
    async def test_missing_points(self, manager, p0_dict):
        result = await ValueTool(manager).execute({"params": p0_dict})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_missing_model(self, manager):
        result = await ValueTool(manager).execute({"points": "1:2"})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_execute_p0(self, manager, p0_dict):
        result = await ValueTool(manager).execute({
            "params": p0_dict,
            "points": "1:2,5:1",
            "high_precision": True,
            "growth": True,
        })
        assert result.success
        waiting, full = result.output["points"]
        assert waiting["region"] == "Waiting"
        assert waiting["value"] == pytest.approx((1.0 - math.exp(-2.0)) * math.exp(-1.0), rel=1e-12)
        assert waiting["value_hp"] == pytest.approx(waiting["value"], rel=1e-12)
        assert full["region"] == "FullSell"
        assert full["value"] == pytest.approx(3.5)
        assert result.output["passed"] is True

    @pytest.mark.asyncio
    async def test_from_solution(self, manager, p1_solution):
        result = await ValueTool(manager).execute({
            "solution": p1_solution.to_dict(),
            "points": [[p1_solution.bstar + 0.1, 1.0]],
        })
        assert result.success
        assert result.output["bstar"] == p1_solution.bstar
        assert result.output["points"][0]["region"] == "PartialSell"

    @pytest.mark.asyncio
    async def test_alpha_limits(self, manager, p0_dict):
        result = await ValueTool(manager).execute({
            "params": p0_dict,
            "points": "1:2",
            "alphas": [1.0, 0.1, 0.01],
        })
        assert result.success
        limits = result.output["alpha_limits"][0]
        assert limits["limit_small"] == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)

    @pytest.mark.asyncio
    async def test_bad_point(self, manager, p0_dict):
        result = await ValueTool(manager).execute({"params": p0_dict, "points": "1:x"})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"


class TestVerifyTool:
    """Tests for VerifyTool."""

    def test_tool_properties(self):
        tool = VerifyTool(Mock())
        assert tool.name == "extraction_verify"
        assert "HJB" in tool.description

    @pytest.mark.asyncio
    async def test_missing_model(self, manager):
        result = await VerifyTool(manager).execute({})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_execute_p0(self, manager, p0_dict):
        result = await VerifyTool(manager).execute({"params": p0_dict, "levels": 4, "far_points": 2})
        assert result.success
        assert result.output["passed"] is True, result.output["failures"]
        assert "identity_residuals" in result.output
        row = result.output["rows"][0]
        assert row["passed"] is True
        assert row["failure_count"] == 0
        assert "h2_discrepancy" not in row

    @pytest.mark.asyncio
    async def test_execute_with_jumps(self, manager, p1_dict):
        result = await VerifyTool(manager).execute({"params": p1_dict, "levels": 4, "far_points": 2})
        assert result.success
        assert result.output["passed"] is True, result.output["failures"]
        assert result.output["h2_variant"] == "sigma_squared"

    @pytest.mark.asyncio
    async def test_strict_tolerance_fails(self, p1_dict):
        manager = ExtractionManager({"quadrature_tol": -1.0})
        result = await VerifyTool(manager).execute({"params": p1_dict, "levels": 4, "far_points": 2})
        assert result.success
        assert result.output["passed"] is False
        assert result.output["failures"]


class TestSimulateTool:
    """Tests for SimulateTool."""

    def test_tool_properties(self):
        tool = SimulateTool(Mock())
        assert tool.name == "extraction_simulate"
        assert set(tool.input_schema["required"]) == {"params", "x0", "y0"}
        assert "bridge_max" in tool.input_schema["properties"]

    @pytest.mark.asyncio
    async def test_missing_inputs(self, manager, p0_dict):
        result = await SimulateTool(manager).execute({"params": p0_dict, "x0": 1.0})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_zero_inventory(self, manager, p0_dict):
        result = await SimulateTool(manager).execute({"params": p0_dict, "x0": 1.0, "y0": 0.0})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"

    @pytest.mark.asyncio
    async def test_execute_at_bstar(self, manager, p0_dict):
        result = await SimulateTool(manager).execute({
            "params": p0_dict, "x0": 1.0, "y0": 1.0, "keep_samples": True, **FAST,
        })
        assert result.success
        output = result.output
        assert output["bstar"] == pytest.approx(2.0)
        assert output["b"] == output["bstar"]
        assert "oracle" in output
        assert len(output["samples"]) == 200
        assert isinstance(output["passed"], bool)

    @pytest.mark.asyncio
    async def test_barrier_comparison(self, manager, p0_dict):
        result = await SimulateTool(manager).execute({
            "params": p0_dict, "x0": 1.0, "y0": 1.0, "barriers": [1.5, 2.5], **FAST,
        })
        assert result.success
        comparisons = result.output["barriers"]
        assert [row["b"] for row in comparisons] == pytest.approx([2.0, 1.5, 2.5])
        assert comparisons[0]["paired_diff"] == 0.0
        assert comparisons[0]["dominated"] is True

    @pytest.mark.asyncio
    async def test_moments(self, manager, p1_dict):
        result = await SimulateTool(manager).execute({
            "params": p1_dict, "x0": 0.0, "y0": 1.0, "b": 100.0, "moments_at": 1.0, **FAST,
        })
        assert result.success
        assert "oracle" not in result.output
        assert "moments" in result.output


class TestStoppingTool:
    """Tests for StoppingTool."""

    def test_tool_properties(self):
        tool = StoppingTool(Mock())
        assert tool.name == "extraction_stopping"
        assert set(tool.input_schema["required"]) == {"params", "x0"}

    @pytest.mark.asyncio
    async def test_missing_x0(self, manager, p0_dict):
        result = await StoppingTool(manager).execute({"params": p0_dict})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_execute_p0(self, manager, p0_dict):
        result = await StoppingTool(manager).execute({"params": p0_dict, "x0": 0.0, **FAST})
        assert result.success
        assert result.output["oracle"]["u"] == pytest.approx(math.exp(-2.0), rel=1e-12)
        assert result.output["rows"][0]["x0"] == 0.0

    @pytest.mark.asyncio
    async def test_validation_error_mapping(self, failing_manager):
        result = await StoppingTool(failing_manager).execute({"params": {}, "x0": 0.0})
        assert result.error["code"] == "VALIDATION_ERROR"


class TestSweepTool:
    """Tests for SweepTool."""

    def test_tool_properties(self):
        tool = SweepTool(Mock())
        assert tool.name == "extraction_sweep"
        assert "lambda_n" in tool.input_schema["properties"]["parameter"]["enum"]

    @pytest.mark.asyncio
    async def test_missing_inputs(self, manager):
        result = await SweepTool(manager).execute({"parameter": "mu"})
        assert not result.success
        assert result.error["code"] == "MISSING_PARAMETER"

    @pytest.mark.asyncio
    async def test_bstar_sweep(self, manager, p1_dict):
        result = await SweepTool(manager).execute({
            "params": p1_dict, "parameter": "mu", "kinds": ["bstar"],
        })
        assert result.success
        assert result.output["passed"] is True, result.output["failures"]
        assert len(result.output["rows"]) == 5

    @pytest.mark.asyncio
    async def test_value_and_roots(self, manager, p1_dict):
        result = await SweepTool(manager).execute({
            "params": p1_dict,
            "parameter": "sigma",
            "grid": [0.2, 0.4, 0.8],
            "probes": "0:1,3:0.5",
        })
        assert result.success
        entry = result.output["reports"][0]
        assert set(entry) >= {"bstar", "value", "roots", "root_slopes"}
        assert len(result.output["rows"]) == 6

    @pytest.mark.asyncio
    async def test_random_bases(self, manager):
        result = await SweepTool(manager).execute({
            "parameter": "lambda_n", "random_bases": 2, "kinds": ["bstar"], "seed": 3,
        })
        assert result.success
        assert len(result.output["reports"]) == 2
        assert all(r["base"]["lambda_n"] > 0.0 for r in result.output["reports"])

    @pytest.mark.asyncio
    async def test_unknown_parameter(self, manager, p1_dict):
        result = await SweepTool(manager).execute({"params": p1_dict, "parameter": "rho"})
        assert not result.success
        assert result.error["code"] == "VALIDATION_ERROR"
