"""Simulation tools: barrier strategies and the stopping problem."""

from .simulate import SimulateTool
from .stopping import StoppingTool

__all__ = [
    "SimulateTool",
    "StoppingTool",
]
