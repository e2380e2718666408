"""
fastrg Post-processing

Pure transformations of sampled edge lists: dropping directions,
thresholding multi-edges, and deleting self-loops.
"""

import logging

import numpy as np

from errors import NotSquareError
from sampler import EdgeList

logger = logging.getLogger(__name__)


def _require_square(edges: EdgeList, operation: str) -> None:
    if edges.n != edges.d:
        raise NotSquareError(f"{operation} needs an n x n edge list, got {edges.n}x{edges.d}")


def symmetrize(edges: EdgeList) -> EdgeList:
    """Store every edge as (min, max) and clear the directed flag."""
    _require_square(edges, "symmetrize")
    return EdgeList(
        n=edges.n,
        d=edges.d,
        sources=np.minimum(edges.sources, edges.targets),
        targets=np.maximum(edges.sources, edges.targets),
        directed=False,
    )


def threshold(edges: EdgeList) -> EdgeList:
    """Keep one copy of each distinct pair, sorted lexicographically."""
    pairs, counts = edges.multiplicities()
    logger.debug(f"Thresholding {len(edges)} edges into {pairs.shape[0]} distinct pairs")
    return EdgeList(
        n=edges.n,
        d=edges.d,
        sources=pairs[:, 0],
        targets=pairs[:, 1],
        directed=edges.directed,
    )


def strip_self_loops(edges: EdgeList) -> EdgeList:
    """
    Delete (i, i) edges.

    This thins the edge count, so unlike the rejection path of sample_graph
    it does not sample the loop-free model; it is a fast approximation.
    """
    _require_square(edges, "strip_self_loops")
    keep = edges.sources != edges.targets
    return EdgeList(
        n=edges.n,
        d=edges.d,
        sources=edges.sources[keep],
        targets=edges.targets[keep],
        directed=edges.directed,
    )
