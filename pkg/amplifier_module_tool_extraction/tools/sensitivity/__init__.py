"""Sensitivity tools: comparative statics sweeps."""

from .sweep import SweepTool

__all__ = [
    "SweepTool",
]
