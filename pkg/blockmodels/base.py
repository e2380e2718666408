"""
Base Block Model Module

Abstract base class for all blockmodel specs with the shared pipeline
that turns block parameters into a FactorModel.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np

from errors import (
    DimensionMismatchError,
    ProbabilityOutOfRangeError,
    UnsupportedMeanFunctionError,
)
from model import FactorModel, scale_to_avg_degree, validate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class BlockSpec(ABC):
    """Block connectivity B shared by every model in the family."""
    B: np.ndarray
    bernoulli: bool = False

    model_name: ClassVar[str] = "unknown"
    supports_bernoulli: ClassVar[bool] = False

    @abstractmethod
    def build_x(self) -> np.ndarray:
        """
        Build the n x K node feature matrix.

        Returns:
            Float matrix whose rows follow the model's restriction
        """
        pass

    @abstractmethod
    def check_x(self, X: np.ndarray) -> None:
        """Raise if X breaks the model's row restriction."""
        pass

    def block_matrix(self) -> np.ndarray:
        """B as a square float matrix."""
        B = np.asarray(self.B, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimensionMismatchError(f"B must be K x K, got shape {B.shape}")
        return B

    def mixing_matrix(self) -> np.ndarray:
        """S = B, or S = -ln(1 - B) when the Bernoulli transform is on."""
        B = self.block_matrix()
        if not self.bernoulli:
            return B

        if not self.supports_bernoulli:
            raise UnsupportedMeanFunctionError(
                f"the Bernoulli transform only applies to the SBM, not {self.model_name}"
            )
        if not ((B >= 0) & (B < 1)).all():
            raise ProbabilityOutOfRangeError("Bernoulli block probabilities must lie in [0, 1)")
        return -np.log1p(-B)

    def to_factor_model(self, avg_deg: Optional[float] = None) -> FactorModel:
        """
        Build, check and validate the FactorModel.

        avg_deg rescaling runs after the Bernoulli transform, which voids
        its exact edge probabilities.

        Args:
            avg_deg: Target expected edges per node, or None to keep B's scale

        Returns:
            Square FactorModel (Y = X)
        """
        S = self.mixing_matrix()
        X = self.build_x()
        self.check_x(X)

        if X.shape[1] != S.shape[0]:
            raise DimensionMismatchError(
                f"{self.model_name}: X has {X.shape[1]} blocks but B is {S.shape[0]} x {S.shape[1]}"
            )

        model = validate(X, S)
        if avg_deg is not None:
            if self.bernoulli:
                logger.warning(
                    f"{self.model_name}: avg_deg rescaling after the Bernoulli "
                    f"transform; edge probabilities are no longer B"
                )
            model = scale_to_avg_degree(model, avg_deg)

        logger.info(f"Built {self.model_name} model: n={model.n}, K={model.kx}")
        return model
