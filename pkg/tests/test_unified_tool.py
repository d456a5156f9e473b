"""Tests for ExtractionUnifiedTool and module mounting."""

from unittest.mock import AsyncMock, Mock

import pytest

from amplifier_module_tool_extraction import mount
from amplifier_module_tool_extraction.manager import ExtractionManager
from amplifier_module_tool_extraction.unified_tool import ExtractionUnifiedTool

OPERATIONS = ["cofactors", "simulate", "solve", "stopping", "sweep", "value", "verify"]


class TestExtractionUnifiedTool:
    """Tests for ExtractionUnifiedTool class."""

    @pytest.fixture
    def mock_manager(self):
        return Mock(spec=ExtractionManager)

    def test_tool_properties(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)

        assert tool.name == "extraction"
        assert "barrier" in tool.description

        schema = tool.input_schema
        assert schema["type"] == "object"
        assert schema["required"] == ["operation", "parameters"]
        assert sorted(schema["properties"]["operation"]["enum"]) == OPERATIONS

    @pytest.mark.asyncio
    async def test_execute_missing_operation(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        result = await tool.execute({"parameters": {}})
        assert not result.success
        assert "operation" in result.error["message"].lower()
        assert result.error["code"] == "VALIDATION_ERROR"

    @pytest.mark.asyncio
    async def test_execute_unknown_operation(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        result = await tool.execute({"operation": "hedge", "parameters": {}})
        assert not result.success
        assert "unknown operation" in result.error["message"].lower()
        assert "cofactors, simulate" in result.error["message"]

    @pytest.mark.asyncio
    async def test_execute_invalid_parameters_type(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        result = await tool.execute({"operation": "solve", "parameters": "P1"})
        assert not result.success
        assert "parameters must be an object" in result.error["message"]

    @pytest.mark.asyncio
    async def test_execute_delegates_to_tool(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        mock_result = Mock(success=True, output={"bstar": 2.0})
        tool._tools["solve"].execute = AsyncMock(return_value=mock_result)

        result = await tool.execute({"operation": "solve", "parameters": {"params": "p0.json"}})

        tool._tools["solve"].execute.assert_called_once_with({"params": "p0.json"})
        assert result.output == {"bstar": 2.0}

    @pytest.mark.asyncio
    async def test_unexpected_error_is_wrapped(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        tool._tools["verify"].execute = AsyncMock(side_effect=RuntimeError("pool died"))

        result = await tool.execute({"operation": "verify", "parameters": {}})

        assert not result.success
        assert result.error["code"] == "TOOL_EXECUTION_ERROR"
        assert "pool died" in result.error["message"]

    @pytest.mark.asyncio
    async def test_end_to_end_solve(self, manager, p0_dict):
        tool = ExtractionUnifiedTool(manager)
        result = await tool.execute({"operation": "solve", "parameters": {"params": p0_dict}})
        assert result.success
        assert result.output["bstar"] == pytest.approx(2.0, abs=1e-12)

    def test_get_operation_schema(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        schema = tool.get_operation_schema("simulate")
        assert schema is not None
        assert "x0" in schema["properties"]
        assert tool.get_operation_schema("nonexistent") is None

    def test_list_operations(self, mock_manager):
        tool = ExtractionUnifiedTool(mock_manager)
        operations = tool.list_operations()
        assert [op["operation"] for op in operations] == OPERATIONS
        assert all(op["description"] for op in operations)


class TestMount:
    """Tests for mounting the module with a coordinator."""

    @pytest.mark.asyncio
    async def test_mount_registers_tool(self):
        coordinator = Mock()
        coordinator.mount = AsyncMock()

        cleanup = await mount(coordinator, {"seed": 5})

        coordinator.mount.assert_awaited_once()
        args, kwargs = coordinator.mount.call_args
        assert args[0] == "tools"
        assert isinstance(args[1], ExtractionUnifiedTool)
        assert kwargs["name"] == "extraction"
        assert args[1].manager.seed == 5
        await cleanup()

    @pytest.mark.asyncio
    async def test_mount_tolerance_keys(self):
        coordinator = Mock()
        coordinator.mount = AsyncMock()
        cleanup = await mount(coordinator, {"quadrature_tol": 1e-6, "root_tol": 1e-8})
        manager = coordinator.mount.call_args[0][1].manager
        assert manager.tolerances["quadrature_tol"] == 1e-6
        assert manager.tolerances["root_tol"] == 1e-8
        assert manager.tolerances["identity_tol"] == 1e-10
        await cleanup()

    @pytest.mark.asyncio
    async def test_mount_without_config(self):
        coordinator = Mock()
        coordinator.mount = AsyncMock()
        cleanup = await mount(coordinator)
        assert callable(cleanup)
        await cleanup()

    @pytest.mark.asyncio
    async def test_mount_invalid_config(self):
        coordinator = Mock()
        coordinator.mount = AsyncMock()
        with pytest.raises(Exception, match="max_workers"):
            await mount(coordinator, {"max_workers": 0})
        coordinator.mount.assert_not_awaited()
