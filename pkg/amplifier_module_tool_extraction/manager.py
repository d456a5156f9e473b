"""
Extraction Manager

Owns configuration, the solution cache and the worker pool used by the
Monte Carlo engine and the parameter sweeps.
"""

import json
import logging
import os
from collections import OrderedDict
from concurrent.futures import Executor, ProcessPoolExecutor
from pathlib import Path
from typing import Any

from .core.model import ModelParams
from .core.sim import PathConfig
from .core.solver import BarrierSolution, solve
from .exceptions import ValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "identity_tol": 1e-10,
    "closed_form_tol": 1e-9,
    "quadrature_tol": 1e-7,
    "root_tol": 1e-10,
}


class ExtractionManager:
    """Manages configuration, cached solutions and the simulation executor."""

    def __init__(self, config: dict[str, Any]):
        """
        Initialize the extraction manager.

        Args:
            config: Configuration dictionary with settings:
                - seed: Master seed for Monte Carlo streams (default: 42, env EXTRACTION_SEED)
                - paths: Monte Carlo paths per estimate (default: 200000)
                - dt_factor: Time step as a fraction of 1/ρ (default: 1e-3)
                - discount_floor: Horizon chosen so e^{−ρT} equals this (default: 1e-9)
                - bridge_max: Use the exact Brownian-bridge maximum between grid points (default: False)
                - max_workers: Worker processes; 1 runs in-process (default: 1, env EXTRACTION_MAX_WORKERS)
                - chunk_size: Paths per worker task (default: 2000)
                - identity_tol, closed_form_tol, quadrature_tol, root_tol: Verification tolerances
                - cache_size: Number of solved parameter sets kept (default: 32)
        """
        self.config = config
        self.seed = int(config.get("seed", os.environ.get("EXTRACTION_SEED", 42)))
        self.paths = int(config.get("paths", 200_000))
        self.dt_factor = float(config.get("dt_factor", 1e-3))
        self.discount_floor = float(config.get("discount_floor", 1e-9))
        self.bridge_max = bool(config.get("bridge_max", False))
        self.max_workers = int(config.get("max_workers", os.environ.get("EXTRACTION_MAX_WORKERS", 1)))
        self.chunk_size = int(config.get("chunk_size", 2000))
        self.cache_size = int(config.get("cache_size", 32))
        self._tolerances = {
            key: float(config.get(key, default)) for key, default in DEFAULT_TOLERANCES.items()
        }
        self.executor: Executor | None = None
        self._cache: OrderedDict = OrderedDict()

        if self.max_workers < 1:
            raise ValidationError(f"max_workers must be at least 1, got {self.max_workers}")
        if self.chunk_size < 1:
            raise ValidationError(f"chunk_size must be at least 1, got {self.chunk_size}")
        if not 0.0 < self.discount_floor < 1.0:
            raise ValidationError(f"discount_floor must lie in (0, 1), got {self.discount_floor}")
        logger.info(f"Manager initialized with seed={self.seed}, max_workers={self.max_workers}")

    async def start(self):
        """Start the manager and create the worker pool."""
        logger.info("Starting extraction manager")
        if self.max_workers > 1 and self.executor is None:
            self.executor = ProcessPoolExecutor(max_workers=self.max_workers)
            logger.info(f"Process pool started with {self.max_workers} workers")

    async def stop(self):
        """Stop the manager and shut down the worker pool."""
        logger.info("Stopping extraction manager")
        if self.executor is not None:
            self.executor.shutdown(wait=True)
            self.executor = None
        self._cache.clear()

    @property
    def tolerances(self) -> dict[str, float]:
        return dict(self._tolerances)

    def _read_json(self, source: dict[str, Any] | str | Path, what: str) -> dict[str, Any]:
        if isinstance(source, dict):
            return source
        if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
            path = Path(source)
            if not path.is_file():
                raise ValidationError(f"{what} file not found: {path}")
            text = path.read_text()
        else:
            text = str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Invalid {what} JSON: {e}")
        if not isinstance(data, dict):
            raise ValidationError(f"{what} JSON must be an object")
        return data

    def load_params(self, source: dict[str, Any] | str | Path) -> ModelParams:
        """
        Parse and validate model parameters.

        Args:
            source: A dict, a JSON string or a path to a JSON file

        Returns:
            Validated ModelParams
        """
        return ModelParams.from_dict(self._read_json(source, "params"))

    def load_solution(self, source: dict[str, Any] | str | Path) -> BarrierSolution:
        """Rebuild a serialized BarrierSolution without re-solving."""
        data = self._read_json(source, "solution")
        if "bstar" not in data or "K" not in data or "params" not in data:
            raise ValidationError("solution JSON needs 'params', 'bstar', 'K' and 'roots'")
        try:
            return BarrierSolution.from_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Malformed solution JSON: {e}")

    def solve(self, params: ModelParams) -> BarrierSolution:
        """Solve params, reusing a cached solution for an equal parameter set."""
        cached = self._cache.get(params)
        if cached is not None:
            self._cache.move_to_end(params)
            logger.debug("Solution cache hit")
            return cached
        solution = solve(params)
        self._cache[params] = solution
        while len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return solution

    def path_config(self, params: ModelParams, overrides: dict[str, Any] | None = None) -> PathConfig:
        """PathConfig from the manager defaults with per-call overrides (None means default)."""
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        return PathConfig.for_params(
            params,
            dt_factor=self.dt_factor,
            discount_floor=self.discount_floor,
            dt=overrides.get("dt"),
            horizon=overrides.get("horizon"),
            seed=int(overrides.get("seed", self.seed)),
            paths=int(overrides.get("paths", self.paths)),
            bridge_max=bool(overrides.get("bridge_max", self.bridge_max)),
        )
