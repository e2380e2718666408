"""
Overlapping Stochastic Blockmodel

X = Z, a binary matrix whose rows may switch on several blocks.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from blockmodels.base import BlockSpec
from errors import NonBinaryEntryError
from model import FactorModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class OverlappingSpec(BlockSpec):
    """Binary block memberships Z."""
    Z: np.ndarray

    model_name = "Overlapping SBM"

    def build_x(self) -> np.ndarray:
        return np.array(self.Z, dtype=np.float64)

    def check_x(self, X: np.ndarray) -> None:
        binary = np.isin(X, (0.0, 1.0))
        if not binary.all():
            position = tuple(int(k) for k in np.argwhere(~binary)[0])
            raise NonBinaryEntryError(f"Z{list(position)}={X[position]} is not 0 or 1")


def overlapping_factors(
    Z: ArrayLike, B: ArrayLike, avg_deg: Optional[float] = None
) -> FactorModel:
    """
    Factor model of an overlapping SBM.

    Args:
        Z: n x K binary memberships
        B: K x K block rates
        avg_deg: Optional target average degree

    Returns:
        FactorModel with X = Z and Y = X
    """
    spec = OverlappingSpec(Z=np.asarray(Z), B=np.asarray(B))
    return spec.to_factor_model(avg_deg)
