"""
fastrg Utility Functions

Parsers for comma-separated flag values used across the CLI.
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)


def parse_float_list(text: str) -> list[float]:
    """
    Parse "0.5,0.1, 2" -> [0.5, 0.1, 2.0].

    Raises:
        ValueError: on an empty list or a non-numeric item
    """
    items = [item.strip() for item in text.split(",")]
    if not text.strip() or any(not item for item in items):
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")
    return [float(item) for item in items]


def parse_int_list(text: str) -> list[int]:
    """
    Parse "2,2,3" -> [2, 2, 3]; scientific notation is accepted for whole
    numbers, so "1e4,1e5" -> [10000, 100000].
    """
    values = []
    for value in parse_float_list(text):
        if not value.is_integer():
            raise ValueError(f"expected whole numbers, got {value}")
        values.append(int(value))
    return values


def parse_square_matrix(text: str) -> np.ndarray:
    """
    Parse a row-major K*K list into a K x K matrix.

    "0.5,0.1,0.1,0.5" -> [[0.5, 0.1], [0.1, 0.5]]
    """
    values = parse_float_list(text)
    k = math.isqrt(len(values))
    if k * k != len(values):
        raise ValueError(f"{len(values)} values do not form a square matrix")
    return np.array(values, dtype=np.float64).reshape(k, k)
