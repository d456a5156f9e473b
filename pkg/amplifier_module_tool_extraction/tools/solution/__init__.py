"""Solution tools: barrier, coefficients and the cofactor identities."""

from .solve import SolveTool
from .cofactors import CofactorsTool

__all__ = [
    "SolveTool",
    "CofactorsTool",
]
