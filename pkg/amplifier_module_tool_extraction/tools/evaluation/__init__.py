"""Evaluation tools: value function and HJB verification."""

from .value import ValueTool
from .verify import VerifyTool

__all__ = [
    "ValueTool",
    "VerifyTool",
]
