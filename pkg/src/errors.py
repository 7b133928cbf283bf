"""
Exception hierarchy for mrdlab.

Every error carries a stable machine-readable code; the CLI prints
``to_dict()`` as JSON on stderr and exits with status 1.
"""

from typing import Any, Dict, Optional


class MrdLabError(Exception):
    """Base class for all computational errors."""

    code = "mrdlab_error"

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """JSON-serializable view of the error."""
        payload: Dict[str, Any] = {"error": self.code, "message": self.message}
        if self.details:
            payload["details"] = {key: str(value) for key, value in self.details.items()}
        return payload


# Fields

class NonPrimeCharacteristic(MrdLabError, ValueError):
    code = "non_prime_characteristic"


class ReducibleModulus(MrdLabError, ValueError):
    code = "reducible_modulus"


class FieldTooLarge(MrdLabError, ValueError):
    code = "field_too_large"


class DivisionByZero(MrdLabError, ZeroDivisionError):
    code = "division_by_zero"


# Matrices

class ShapeMismatch(MrdLabError, ValueError):
    code = "shape_mismatch"


class FieldMismatch(MrdLabError, ValueError):
    code = "field_mismatch"


class EnumerationTooLarge(MrdLabError):
    code = "enumeration_too_large"


class ParameterOutOfRange(MrdLabError, ValueError):
    code = "parameter_out_of_range"


# Codes and distributions

class CodeTooSmall(MrdLabError, ValueError):
    code = "code_too_small"


class NotFullRank(MrdLabError, ValueError):
    code = "not_full_rank"


class NotRepresentable(MrdLabError, ValueError):
    code = "not_representable"


class EmptySupport(MrdLabError, ValueError):
    code = "empty_support"


class NotFullRankSupport(MrdLabError, ValueError):
    code = "not_full_rank_support"


# Geometry and search

class NotADesign(MrdLabError):
    code = "not_a_design"


class BasisMismatch(MrdLabError, ValueError):
    code = "basis_mismatch"


class EqualPoints(MrdLabError, ValueError):
    code = "equal_points"


class BudgetExhausted(MrdLabError):
    """Search stopped before completion; ``result`` holds the best-so-far outcome."""

    code = "budget_exhausted"

    def __init__(self, message: str = "", result: Optional[Any] = None, **details: Any):
        super().__init__(message, **details)
        self.result = result

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        if self.result is not None and hasattr(self.result, "model_dump"):
            payload["result"] = self.result.model_dump(mode="json")
        return payload


class PropertyNotVerified(MrdLabError, ValueError):
    code = "property_not_verified"


# Plumbing

class InternalConsistencyError(MrdLabError, AssertionError):
    """Two independent computations of the same quantity disagree."""

    code = "internal_consistency"


class FormatError(MrdLabError, ValueError):
    code = "format_error"
