"""Test configuration for extraction module tests."""

import copy
import math

import pytest

from amplifier_module_tool_extraction.core.model import ModelParams
from amplifier_module_tool_extraction.core.sim import PathConfig
from amplifier_module_tool_extraction.core.solver import solve
from amplifier_module_tool_extraction.manager import ExtractionManager

# Pure diffusion with roots ±1 and b* = 2.
P0 = {
    "mu": 0.0,
    "sigma": math.sqrt(2.0),
    "rho": 1.0,
    "alpha": 1.0,
    "c": 1.0,
    "lambda_n": 0.0,
    "lambda_p": 0.0,
    "mix_n": [],
    "mix_p": [],
}

# One exponential component on each side.
P1 = {
    "mu": 0.05,
    "sigma": 0.4,
    "rho": 0.1,
    "alpha": 0.5,
    "c": 1.0,
    "lambda_n": 0.8,
    "lambda_p": 0.6,
    "mix_n": [{"w": 1.0, "beta": 2.0}],
    "mix_p": [{"w": 1.0, "beta": 3.0}],
}

# Two components per side.
P2 = {
    "mu": -0.02,
    "sigma": 0.3,
    "rho": 0.08,
    "alpha": 1.2,
    "c": 0.5,
    "lambda_n": 1.1,
    "lambda_p": 0.4,
    "mix_n": [{"w": 0.3, "beta": 1.5}, {"w": 0.7, "beta": 4.0}],
    "mix_p": [{"w": 0.6, "beta": 2.5}, {"w": 0.4, "beta": 6.0}],
}


@pytest.fixture
def p0_dict():
    """P0 parameters as JSON-ready dict."""
    return copy.deepcopy(P0)


@pytest.fixture
def p1_dict():
    """P1 parameters as JSON-ready dict."""
    return copy.deepcopy(P1)


@pytest.fixture
def p0():
    return ModelParams.from_dict(P0)


@pytest.fixture
def p1():
    return ModelParams.from_dict(P1)


@pytest.fixture
def p2():
    return ModelParams.from_dict(P2)


@pytest.fixture(scope="session")
def p0_solution():
    return solve(ModelParams.from_dict(P0))


@pytest.fixture(scope="session")
def p1_solution():
    return solve(ModelParams.from_dict(P1))


@pytest.fixture(scope="session")
def p2_solution():
    return solve(ModelParams.from_dict(P2))


@pytest.fixture
def extraction_config():
    """Small configuration for fast in-process runs."""
    return {
        "seed": 42,
        "paths": 2000,
        "bridge_max": True,
        "max_workers": 1,
        "chunk_size": 500,
    }


@pytest.fixture
def manager(extraction_config):
    return ExtractionManager(extraction_config)


@pytest.fixture
def fast_paths():
    """Coarse grid with exact bridge maxima, enough for 4-stderr checks on P0."""
    return PathConfig(dt=0.01, horizon=15.0, seed=42, paths=4000, bridge_max=True)
