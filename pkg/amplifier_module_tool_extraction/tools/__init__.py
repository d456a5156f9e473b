"""Extraction tool implementations."""

from .base import ExtractionBaseTool

# Barrier, coefficients and cofactor identities
from .solution import (
    SolveTool,
    CofactorsTool,
)

# Value function and HJB verification
from .evaluation import (
    ValueTool,
    VerifyTool,
)

# Monte Carlo
from .simulation import (
    SimulateTool,
    StoppingTool,
)

# Comparative statics
from .sensitivity import (
    SweepTool,
)

__all__ = [
    "ExtractionBaseTool",
    "SolveTool",
    "CofactorsTool",
    "ValueTool",
    "VerifyTool",
    "SimulateTool",
    "StoppingTool",
    "SweepTool",
]
