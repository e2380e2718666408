"""
Chung-Lu Model

Rank one: X is the weight vector as an n x 1 matrix and S = [[1]], so
lambda_ij = w_i * w_j.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from blockmodels.base import BlockSpec
from errors import AllZeroWeightsError, DimensionMismatchError, NegativeWeightError
from model import FactorModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class ChungLuSpec(BlockSpec):
    """Per-node expected-degree weights."""
    weights: np.ndarray
    B: np.ndarray = field(default_factory=lambda: np.ones((1, 1)))

    model_name = "Chung-Lu"

    def build_x(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise DimensionMismatchError("weights must be a non-empty vector")
        return w[:, None]

    def check_x(self, X: np.ndarray) -> None:
        if (X < 0).any():
            raise NegativeWeightError("Chung-Lu weights must be non-negative")
        if not (X > 0).any():
            raise AllZeroWeightsError("at least one Chung-Lu weight must be positive")


def chung_lu_factors(weights: ArrayLike, avg_deg: Optional[float] = None) -> FactorModel:
    """
    Factor model of a Chung-Lu graph.

    Args:
        weights: Non-negative weight per node, some positive
        avg_deg: Optional target average degree

    Returns:
        FactorModel with X = w (n x 1), S = [[1]], Y = X
    """
    spec = ChungLuSpec(weights=np.asarray(weights))
    return spec.to_factor_model(avg_deg)
