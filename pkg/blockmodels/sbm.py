"""
Stochastic Blockmodel

Each node belongs to exactly one block; X is the one-hot membership
matrix. The only model that supports the Bernoulli transform
S = -ln(1 - B), which makes thresholded edge probabilities exactly B.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from blockmodels.base import BlockSpec
from errors import InvalidArgumentError, LabelOutOfRangeError
from model import FactorModel

logger = logging.getLogger(__name__)


def memberships_from_sizes(sizes: Sequence[int]) -> np.ndarray:
    """Labels filled block by block, block 0 first: [2, 2] -> [0, 0, 1, 1]."""
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.ndim != 1 or sizes.size == 0 or (sizes < 0).any():
        raise InvalidArgumentError(f"block sizes must be non-negative counts, got {sizes}")
    return np.repeat(np.arange(sizes.size), sizes)


def sample_memberships(n: int, pi: ArrayLike, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. block labels with block proportions pi."""
    p = np.asarray(pi, dtype=np.float64)
    if n < 0 or p.ndim != 1 or (p < 0).any() or p.sum() <= 0:
        raise InvalidArgumentError("pi must be non-negative proportions and n >= 0")
    return rng.choice(p.size, size=n, p=p / p.sum())


def one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    """n x k indicator matrix of labels."""
    X = np.zeros((labels.shape[0], k))
    X[np.arange(labels.shape[0]), labels] = 1.0
    return X


def check_labels(memberships: ArrayLike, k: int) -> np.ndarray:
    """Labels as int64, each in [0, k)."""
    labels = np.asarray(memberships)
    if labels.ndim != 1 or labels.size == 0:
        raise InvalidArgumentError("memberships must be a non-empty label vector")
    if not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.mod(labels, 1) == 0):
            raise LabelOutOfRangeError("block labels must be integers")
        labels = labels.astype(np.int64)
    bad = (labels < 0) | (labels >= k)
    if bad.any():
        i = int(np.argmax(bad))
        raise LabelOutOfRangeError(f"node {i} has label {labels[i]} outside [0, {k})")
    return labels.astype(np.int64)


@dataclass(frozen=True, kw_only=True)
class SBMSpec(BlockSpec):
    """SBM with hard block labels."""
    memberships: np.ndarray

    model_name = "SBM"
    supports_bernoulli = True

    def build_x(self) -> np.ndarray:
        k = self.block_matrix().shape[0]
        return one_hot(check_labels(self.memberships, k), k)

    def check_x(self, X: np.ndarray) -> None:
        if not np.isin(X, (0.0, 1.0)).all() or not (X.sum(axis=1) == 1).all():
            raise LabelOutOfRangeError("SBM rows must each indicate exactly one block label")


def sbm_factors(
    memberships: ArrayLike,
    B: ArrayLike,
    bernoulli: bool = False,
    avg_deg: Optional[float] = None,
) -> FactorModel:
    """
    Factor model of an SBM.

    Args:
        memberships: Block label per node
        B: K x K block rates (block probabilities when bernoulli is set)
        bernoulli: Transform B to -ln(1 - B) for exact thresholded probabilities
        avg_deg: Optional target average degree

    Returns:
        FactorModel with one-hot X and Y = X
    """
    spec = SBMSpec(memberships=np.asarray(memberships), B=np.asarray(B), bernoulli=bernoulli)
    return spec.to_factor_model(avg_deg)


def erdos_renyi_factors(
    n: int, p: float, bernoulli: bool = False, avg_deg: Optional[float] = None
) -> FactorModel:
    """Erdos-Renyi as a one-block SBM: X = 1_n, S = [[p]]."""
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    return sbm_factors(np.zeros(n, dtype=np.int64), [[p]], bernoulli, avg_deg)
