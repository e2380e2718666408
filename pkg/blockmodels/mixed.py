"""
Mixed Membership Stochastic Blockmodel

X = Pi, where each row of Pi is a probability vector over the K blocks.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from blockmodels.base import BlockSpec
from errors import InvalidArgumentError, SimplexViolationError
from model import FactorModel

logger = logging.getLogger(__name__)

SIMPLEX_TOLERANCE = 1e-12


def sample_mixed_memberships(
    n: int, alpha: ArrayLike, rng: np.random.Generator
) -> np.ndarray:
    """n Dirichlet(alpha) membership rows."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if n < 1 or alpha.ndim != 1 or not (alpha > 0).all():
        raise InvalidArgumentError("alpha must be positive and n >= 1")
    return rng.dirichlet(alpha, size=n)


@dataclass(frozen=True, kw_only=True)
class MixedMembershipSpec(BlockSpec):
    """Soft memberships Pi (rows on the simplex)."""
    Pi: np.ndarray

    model_name = "Mixed Membership SBM"

    def build_x(self) -> np.ndarray:
        X = np.array(self.Pi, dtype=np.float64)
        if X.ndim != 2:
            raise SimplexViolationError(f"Pi must be a matrix, got {X.ndim}-D")
        return X

    def check_x(self, X: np.ndarray) -> None:
        if (X < 0).any():
            raise SimplexViolationError("Pi entries must be non-negative")
        drift = np.abs(X.sum(axis=1) - 1.0)
        if (drift > SIMPLEX_TOLERANCE).any():
            i = int(np.argmax(drift))
            raise SimplexViolationError(f"row {i} of Pi sums to {X[i].sum()}, not 1")


def mixed_membership_factors(
    Pi: ArrayLike, B: ArrayLike, avg_deg: Optional[float] = None
) -> FactorModel:
    """
    Factor model of a mixed-membership SBM.

    Args:
        Pi: n x K membership rows on the simplex
        B: K x K block rates
        avg_deg: Optional target average degree

    Returns:
        FactorModel with X = Pi and Y = X
    """
    spec = MixedMembershipSpec(Pi=np.asarray(Pi), B=np.asarray(B))
    return spec.to_factor_model(avg_deg)
