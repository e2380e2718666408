"""
fastrg Errors

Exception hierarchy shared by every module. All errors derive from
FastRGError so the CLI has a single catch site for data errors.
"""

from typing import Optional


class FastRGError(ValueError):
    """Base class for all fastrg errors."""


class InvalidArgumentError(FastRGError):
    """A precondition on a scalar argument does not hold."""


# ============================================
# MODEL VALIDATION
# ============================================


class NegativeEntryError(FastRGError):
    """A factor matrix holds a negative entry."""

    def __init__(self, matrix: str, position: tuple[int, ...], value: float):
        self.matrix = matrix
        self.position = position
        self.value = value
        super().__init__(f"{matrix} has negative entry {value} at {position}")


class DimensionMismatchError(FastRGError):
    """Factor matrix shapes do not line up."""


class NonFiniteError(FastRGError):
    """A factor matrix or weight vector holds NaN or Inf."""


class EmptyMatrixError(FastRGError):
    """A factor matrix has zero rows or columns."""


class IndexOutOfRangeError(FastRGError, IndexError):
    """A node index is outside the model."""


class DegenerateModelError(FastRGError):
    """The model has zero total rate where a positive one is required."""


class NotSquareError(FastRGError):
    """The operation needs Y = X (or an n x n edge list)."""


class ModelTooLargeError(FastRGError):
    """The total rate would overflow the edge-count type."""


# ============================================
# SAMPLING
# ============================================


class AllZeroWeightsError(FastRGError):
    """Every weight is zero, so no category can be drawn."""


class NegativeWeightError(FastRGError):
    """A weight vector holds a negative entry."""


class RejectionStallError(FastRGError):
    """Self-loop rejection exceeded the consecutive-rejection cap."""


# ============================================
# BLOCKMODELS
# ============================================


class ProbabilityOutOfRangeError(FastRGError):
    """A Bernoulli block probability is outside [0, 1)."""


class LabelOutOfRangeError(FastRGError):
    """A block label is outside [0, K)."""


class NonPositiveThetaError(FastRGError):
    """A degree parameter is not strictly positive."""


class SimplexViolationError(FastRGError):
    """A mixed-membership row is not on the probability simplex."""


class NonBinaryEntryError(FastRGError):
    """An overlap matrix entry is neither 0 nor 1."""


class UnsupportedMeanFunctionError(FastRGError):
    """The Bernoulli transform was requested for a non-SBM model."""


# ============================================
# ORACLE
# ============================================


class TooLargeError(FastRGError):
    """A dense reference computation would exceed the cell limit."""


class ProbabilityOverflowError(FastRGError):
    """A rate exceeds 1 where it is used as a Bernoulli probability."""


# ============================================
# FILES AND BENCH
# ============================================


class ParseError(FastRGError):
    """An input file could not be parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.column = column

        location = path or "<input>"
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {message}")


class ResourceLimitError(FastRGError):
    """A bench point exceeds the configured memory cap."""
