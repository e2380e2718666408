"""
fastrg Factor Model

Parameterization E(A) = X S Y^T with non-negative factors, the column
normalization that turns X and Y into per-block node distributions, and
the closed-form expectations used by the sampler and the oracle.
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from errors import (
    DegenerateModelError,
    DimensionMismatchError,
    EmptyMatrixError,
    IndexOutOfRangeError,
    InvalidArgumentError,
    NegativeEntryError,
    NonFiniteError,
    NotSquareError,
    TooLargeError,
)

logger = logging.getLogger(__name__)

# Configuration
DENSE_CELL_LIMIT = int(os.getenv("FASTRG_DENSE_CELL_LIMIT", str(10**8)))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FactorModel:
    """Non-negative factors (X, S, Y) with E(A) = X S Y^T."""
    X: np.ndarray
    S: np.ndarray
    Y: np.ndarray

    @property
    def square(self) -> bool:
        """True when Y is the same matrix object as X."""
        return self.Y is self.X

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.Y.shape[0]

    @property
    def kx(self) -> int:
        return self.X.shape[1]

    @property
    def ky(self) -> int:
        return self.Y.shape[1]

    def with_mixing(self, S: ArrayLike) -> "FactorModel":
        """Return a copy with S replaced, keeping X, Y and the square flag."""
        mixing = _check_matrix("S", S)
        if mixing.shape != self.S.shape:
            raise DimensionMismatchError(
                f"S must keep shape {self.S.shape}, got {mixing.shape}"
            )
        return replace(self, S=_frozen(mixing))


@dataclass(frozen=True, eq=False)
class NormalizedModel:
    """
    Column-normalized form of a FactorModel used for sampling.

    Xtilde and Ytilde have columns summing to 1, except for columns that
    were all zero in X or Y: those stay zero and the matching row/column
    of Stilde is zero, so the block is never drawn.
    """
    Xtilde: np.ndarray
    Stilde: np.ndarray
    Ytilde: np.ndarray
    lambda_total: float
    cx: np.ndarray
    cy: np.ndarray
    square: bool

    @property
    def x_empty(self) -> np.ndarray:
        return self.cx == 0

    @property
    def y_empty(self) -> np.ndarray:
        return self.cy == 0

    @property
    def block_probabilities(self) -> np.ndarray:
        """Stilde / lambda_total, or all zeros when the total rate is 0."""
        if self.lambda_total == 0:
            return np.zeros_like(self.Stilde)
        return self.Stilde / self.lambda_total


# ============================================
# VALIDATION
# ============================================


def _check_matrix(name: str, raw: ArrayLike) -> np.ndarray:
    """Coerce one factor to a float64 2-D array and check its entries."""
    try:
        matrix = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise DimensionMismatchError(f"{name} is not a numeric matrix: {e}") from e

    if matrix.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got {matrix.ndim}-D")
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise EmptyMatrixError(f"{name} has shape {matrix.shape}")

    finite = np.isfinite(matrix)
    if not finite.all():
        position = tuple(int(i) for i in np.argwhere(~finite)[0])
        raise NonFiniteError(f"{name} has non-finite entry at {position}")

    negative = matrix < 0
    if negative.any():
        position = tuple(int(i) for i in np.argwhere(negative)[0])
        raise NegativeEntryError(name, position, float(matrix[position]))

    return matrix


def validate(X: ArrayLike, S: ArrayLike, Y: Optional[ArrayLike] = None) -> FactorModel:
    """
    Build a FactorModel from raw matrices.

    Args:
        X: n x Kx node features
        S: Kx x Ky mixing matrix
        Y: d x Ky node features; None (or X itself) gives a square model

    Returns:
        FactorModel with read-only float64 factors
    """
    square = Y is None or Y is X

    x = _check_matrix("X", X)
    s = _check_matrix("S", S)
    y = x if square else _check_matrix("Y", Y)

    if x.shape[1] != s.shape[0]:
        raise DimensionMismatchError(
            f"cols(X)={x.shape[1]} does not match rows(S)={s.shape[0]}"
        )
    if s.shape[1] != y.shape[1]:
        raise DimensionMismatchError(
            f"cols(S)={s.shape[1]} does not match cols(Y)={y.shape[1]}"
        )

    x = _frozen(x)
    y = x if square else _frozen(y)
    return FactorModel(X=x, S=_frozen(s), Y=y)


# ============================================
# NORMALIZATION AND EXPECTATIONS
# ============================================


def normalize(model: FactorModel) -> NormalizedModel:
    """Compute C_X, C_Y and the column-normalized factors."""
    cx = model.X.sum(axis=0)
    cy = cx if model.square else model.Y.sum(axis=0)

    # Zero columns divide by 1 and stay zero; C_X S C_Y zeroes their S row.
    safe_cx = np.where(cx > 0, cx, 1.0)
    safe_cy = np.where(cy > 0, cy, 1.0)

    xtilde = _frozen(model.X / safe_cx)
    ytilde = xtilde if model.square else _frozen(model.Y / safe_cy)
    stilde = _frozen(cx[:, None] * model.S * cy[None, :])

    return NormalizedModel(
        Xtilde=xtilde,
        Stilde=stilde,
        Ytilde=ytilde,
        lambda_total=float(stilde.sum()),
        cx=_frozen(cx),
        cy=_frozen(cy),
        square=model.square,
    )


def lambda_ij(model: FactorModel, i: int, j: int) -> float:
    """Rate of cell (i, j): x_i^T S y_j."""
    if not 0 <= i < model.n:
        raise IndexOutOfRangeError(f"source index {i} outside [0, {model.n})")
    if not 0 <= j < model.d:
        raise IndexOutOfRangeError(f"target index {j} outside [0, {model.d})")
    return float(model.X[i] @ model.S @ model.Y[j])


def rate_matrix(model: FactorModel) -> np.ndarray:
    """Dense n x d matrix of all rates X S Y^T."""
    cells = model.n * model.d
    if cells > DENSE_CELL_LIMIT:
        raise TooLargeError(
            f"dense rate matrix needs {cells} cells, limit is {DENSE_CELL_LIMIT}"
        )
    return model.X @ model.S @ model.Y.T


def expected_edge_count(model: FactorModel) -> float:
    """Sum of all rates, 1^T X S Y^T 1, without forming the dense matrix."""
    cx = model.X.sum(axis=0)
    cy = cx if model.square else model.Y.sum(axis=0)
    return float(cx @ model.S @ cy)


def scale_to_avg_degree(model: FactorModel, avg_deg: float) -> FactorModel:
    """
    Rescale S so the directed multigraph has avg_deg expected edges per node.

    Average degree is the expected edge count divided by n, measured before
    any post-processing.
    """
    if not avg_deg > 0:
        raise InvalidArgumentError(f"avg_deg must be positive, got {avg_deg}")

    total = expected_edge_count(model)
    if total == 0:
        raise DegenerateModelError("cannot rescale a model with zero expected edges")

    factor = avg_deg * model.n / total
    logger.debug(f"Scaling S by {factor:.6g} for avg_deg={avg_deg}")
    return model.with_mixing(model.S * factor)


def loopless_rate(model: FactorModel) -> float:
    """
    Total rate with the diagonal removed: sum over i != j of <x_i, x_j>_S.

    Row i is paired with the column sums of every other row, so a model
    with no off-diagonal mass gives exactly 0.
    """
    if not model.square:
        raise NotSquareError("loopless rate needs a square model (Y = X)")

    others = np.clip(model.Y.sum(axis=0) - model.Y, 0.0, None)
    return float(np.einsum("ik,kl,il->", model.X, model.S, others))
