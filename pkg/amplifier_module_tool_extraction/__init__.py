"""
Optimal Extraction Module for Amplifier

Optimal selling of a finite commodity inventory when the price follows a
drifted Brownian motion with two-sided hyper-exponential jumps and each sale
depresses the price linearly. The module solves for the optimal barrier b*,
evaluates the closed-form value function, verifies it against the HJB
variational inequality and confirms it by Monte Carlo.

Operations: solve, cofactors, value, verify, simulate, stopping, sweep.
"""

import logging
from typing import Any

try:
    from amplifier_core import ModuleCoordinator
except ImportError:
    ModuleCoordinator = None

from .manager import ExtractionManager
from .unified_tool import ExtractionUnifiedTool
from .exceptions import (
    ExtractionError,
    NonPositiveError,
    BadMixtureError,
    EmptyMixtureError,
    PoleHitError,
    BracketFailureError,
    SingularMatrixError,
    QuadratureNonConvergenceError,
    ValidationError,
    ToolExecutionError,
)

__version__ = "0.1.0"

logger = logging.getLogger(__name__)


async def mount(coordinator: "ModuleCoordinator", config: dict[str, Any] | None = None):
    """
    Mount the extraction module with Amplifier.

    Args:
        coordinator: The ModuleCoordinator instance for registering capabilities
        config: Optional configuration dictionary, see ExtractionManager for the keys
            (seed, paths, dt_factor, discount_floor, bridge_max, max_workers,
            chunk_size, cache_size, identity_tol, closed_form_tol, quadrature_tol,
            root_tol)

    Returns:
        Async cleanup function to be called when the module is unmounted
    """
    config = config or {}

    logger.info("Mounting extraction module...")
    logger.debug(f"Config received: {config}")

    try:
        manager = ExtractionManager(config)
        await manager.start()

        extraction_tool = ExtractionUnifiedTool(manager)

        await coordinator.mount("tools", extraction_tool, name=extraction_tool.name)
        logger.info(f"Extraction tool mounted successfully with {len(extraction_tool._tools)} operations")

        async def cleanup():
            logger.info("Cleaning up extraction module...")
            await manager.stop()

        return cleanup

    except Exception as e:
        logger.error(f"Failed to mount extraction module: {e}")
        raise


__all__ = [
    "mount",
    "ExtractionManager",
    "ExtractionUnifiedTool",
    # Exceptions
    "ExtractionError",
    "NonPositiveError",
    "BadMixtureError",
    "EmptyMixtureError",
    "PoleHitError",
    "BracketFailureError",
    "SingularMatrixError",
    "QuadratureNonConvergenceError",
    "ValidationError",
    "ToolExecutionError",
]
