"""
Degree-Corrected Stochastic Blockmodel

Row i of X is theta_i times the indicator of node i's block, so each row
holds a single positive entry and expected degrees scale with theta.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from blockmodels.base import BlockSpec
from blockmodels.sbm import check_labels, one_hot
from errors import DimensionMismatchError, NonPositiveThetaError
from model import FactorModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class DCSBMSpec(BlockSpec):
    """SBM labels plus a positive degree parameter per node."""
    memberships: np.ndarray
    theta: np.ndarray

    model_name = "DC-SBM"

    def build_x(self) -> np.ndarray:
        k = self.block_matrix().shape[0]
        labels = check_labels(self.memberships, k)
        theta = np.asarray(self.theta, dtype=np.float64)

        if theta.shape != labels.shape:
            raise DimensionMismatchError(
                f"theta has {theta.size} entries for {labels.size} nodes"
            )
        if not (theta > 0).all():
            i = int(np.argmax(~(theta > 0)))
            raise NonPositiveThetaError(f"theta[{i}]={theta[i]} must be positive")

        return one_hot(labels, k) * theta[:, None]

    def check_x(self, X: np.ndarray) -> None:
        if not ((X > 0).sum(axis=1) == 1).all():
            raise NonPositiveThetaError("DC-SBM rows must hold a single positive entry")


def dcsbm_factors(
    memberships: ArrayLike,
    theta: ArrayLike,
    B: ArrayLike,
    avg_deg: Optional[float] = None,
) -> FactorModel:
    """
    Factor model of a degree-corrected SBM.

    Args:
        memberships: Block label per node
        theta: Positive degree parameter per node
        B: K x K block rates
        avg_deg: Optional target average degree

    Returns:
        FactorModel with X[i] = theta_i * e_{label(i)} and Y = X
    """
    spec = DCSBMSpec(
        memberships=np.asarray(memberships),
        theta=np.asarray(theta),
        B=np.asarray(B),
    )
    return spec.to_factor_model(avg_deg)
