"""
fastrg Alias Tables

Vose's alias method: O(size) construction, O(1) draws. Each draw consumes
exactly one double from the generator: u * size selects a slot and the
fractional part decides between the slot and its alias.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from errors import AllZeroWeightsError, NegativeWeightError, NonFiniteError

logger = logging.getLogger(__name__)

# Scaled weights this close below 1 count as "large".
TIE_TOLERANCE = 1e-15


@dataclass(frozen=True, eq=False)
class AliasTable:
    """Immutable alias table over a fixed weight vector."""
    prob: np.ndarray
    alias: np.ndarray
    total_weight: float

    @property
    def size(self) -> int:
        return self.prob.shape[0]

    def lookup(self, uniforms: ArrayLike) -> np.ndarray:
        """Map Uniform[0, 1) variates to category indices."""
        scaled = np.asarray(uniforms, dtype=np.float64) * self.size
        slot = np.minimum(scaled.astype(np.int64), self.size - 1)
        keep = (scaled - slot) < self.prob[slot]
        return np.where(keep, slot, self.alias[slot])

    def draw(self, rng: np.random.Generator) -> int:
        """Draw one category."""
        return int(self.lookup(rng.random()))

    def draw_many(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw count categories; same stream use as count calls of draw()."""
        if count == 0:
            return np.empty(0, dtype=np.int64)
        return self.lookup(rng.random(count))

    def implied_probabilities(self) -> np.ndarray:
        """Draw probability of every category, read off the table."""
        mass = self.prob.copy()
        np.add.at(mass, self.alias, 1.0 - self.prob)
        return mass / self.size


def build(weights: ArrayLike) -> AliasTable:
    """
    Build an alias table with the two-worklist (small/large) construction.

    Args:
        weights: Non-negative finite weights, at least one positive

    Returns:
        AliasTable drawing category k with probability weights[k] / sum
    """
    w = np.asarray(weights, dtype=np.float64).ravel()

    if w.size == 0 or not np.isfinite(w).all():
        raise NonFiniteError("alias weights must be a non-empty finite vector")
    if (w < 0).any():
        k = int(np.argmax(w < 0))
        raise NegativeWeightError(f"weight {k} is negative ({w[k]})")

    total = float(w.sum())
    if total <= 0:
        raise AllZeroWeightsError("at least one weight must be positive")

    size = w.size
    scaled = (w * (size / total)).tolist()
    prob = [1.0] * size
    alias = list(range(size))

    threshold = 1.0 - TIE_TOLERANCE
    small = [k for k, q in enumerate(scaled) if q < threshold]
    large = [k for k, q in enumerate(scaled) if q >= threshold]

    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < threshold:
            small.append(g)
        else:
            large.append(g)

    # Leftovers in either list are full slots (prob 1, alias to self).

    table = AliasTable(
        prob=np.array(prob, dtype=np.float64),
        alias=np.array(alias, dtype=np.int64),
        total_weight=total,
    )
    table.prob.setflags(write=False)
    table.alias.setflags(write=False)
    logger.debug(f"Built alias table over {size} categories")
    return table


def draw(table: AliasTable, rng: np.random.Generator) -> int:
    """Draw one category from table."""
    return table.draw(rng)


def draw_many(table: AliasTable, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw count categories from table."""
    return table.draw_many(count, rng)


def lookup(table: AliasTable, uniforms: ArrayLike) -> np.ndarray:
    """Map pre-drawn uniforms to categories of table."""
    return table.lookup(uniforms)


def implied_probabilities(table: AliasTable) -> np.ndarray:
    return table.implied_probabilities()
