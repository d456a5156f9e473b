"""
Extraction Module Exceptions

Custom exception classes for the solver, verification and simulation operations.
"""


class ExtractionError(Exception):
    """Base exception for all extraction-related errors."""

    kind = "Extraction"

    def __init__(self, message: str, code: str = "EXTRACTION_ERROR"):
        self.message = message
        self.code = code
        super().__init__(message)

    def to_dict(self) -> dict:
        """Convert exception to dictionary for ToolResult."""
        return {
            "message": self.message,
            "code": self.code,
            "kind": self.kind,
        }


class NonPositiveError(ExtractionError):
    """Raised when a constant that must be strictly positive is not."""

    kind = "NonPositive"

    def __init__(self, field: str, value: float, strict: bool = True):
        self.field = field
        bound = "strictly positive" if strict else "non-negative"
        super().__init__(
            f"Parameter '{field}' must be {bound}, got {value!r}",
            code="NON_POSITIVE"
        )


class BadMixtureError(ExtractionError):
    """Raised when a jump mixture violates its weight/rate invariants."""

    kind = "BadMixture"

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Invalid jump mixture: {reason}", code="BAD_MIXTURE")


class EmptyMixtureError(ExtractionError):
    """Raised when sampling from a mixture with no components."""

    kind = "EmptyMixture"

    def __init__(self):
        super().__init__(
            "Cannot sample a jump size from an empty mixture",
            code="EMPTY_MIXTURE"
        )


class PoleHitError(ExtractionError):
    """Raised when the rational characteristic function is evaluated at a pole."""

    kind = "PoleHit"

    def __init__(self, r: float, pole: float):
        self.r = r
        self.pole = pole
        super().__init__(
            f"Characteristic function evaluated at r={r!r}, too close to pole {pole!r}",
            code="POLE_HIT"
        )


class BracketFailureError(ExtractionError):
    """Raised when a root bracket that must contain a sign change does not."""

    kind = "BracketFailure"

    def __init__(self, interval: tuple[float, float]):
        self.interval = interval
        super().__init__(
            f"No sign change found on bracket [{interval[0]!r}, {interval[1]!r}]",
            code="BRACKET_FAILURE"
        )


class SingularMatrixError(ExtractionError):
    """Raised when the coefficient matrix is numerically singular."""

    kind = "SingularMatrix"

    def __init__(self, det: float, norm: float):
        self.det = det
        self.norm = norm
        super().__init__(
            f"Coefficient matrix is singular: |det|={abs(det)!r}, norm={norm!r}",
            code="SINGULAR_MATRIX"
        )


class QuadratureNonConvergenceError(ExtractionError):
    """Raised when adaptive quadrature exceeds its evaluation budget."""

    kind = "QuadratureNonConvergence"

    def __init__(self, evaluations: int, limit: int):
        self.evaluations = evaluations
        super().__init__(
            f"Adaptive quadrature used {evaluations} evaluations (limit {limit})",
            code="QUADRATURE_NON_CONVERGENCE"
        )


class ValidationError(ExtractionError):
    """Raised when input validation fails."""

    kind = "Validation"

    def __init__(self, message: str):
        super().__init__(message, code="VALIDATION_ERROR")


class ToolExecutionError(ExtractionError):
    """Raised when a tool execution fails unexpectedly."""

    kind = "ToolExecution"

    def __init__(self, tool_name: str, message: str):
        super().__init__(
            f"Tool '{tool_name}' execution failed: {message}",
            code="TOOL_EXECUTION_ERROR"
        )
