"""
fastrg Sampler

Samples a graph with E(A) = X S Y^T in time linear in the number of edges:
draw the edge count m ~ Poisson(sum(Stilde)), split it over blocks with a
multinomial, then draw endpoints per block from alias tables over the
columns of Xtilde and Ytilde.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np
from scipy import sparse

import alias
from errors import (
    DegenerateModelError,
    IndexOutOfRangeError,
    InvalidArgumentError,
    ModelTooLargeError,
    NotSquareError,
    RejectionStallError,
    TooLargeError,
)
from model import (
    DENSE_CELL_LIMIT,
    FactorModel,
    NormalizedModel,
    loopless_rate,
    normalize,
)

logger = logging.getLogger(__name__)

# Configuration
REJECTION_CAP = int(os.getenv("FASTRG_REJECTION_CAP", "1000000"))
BLOCK_WORKERS = int(os.getenv("FASTRG_BLOCK_WORKERS", "4"))
STREAM_CHUNK = int(os.getenv("FASTRG_STREAM_CHUNK", "1024"))

MAX_TOTAL_RATE = float(2**62)
MEMBERSHIP_STREAM = 0


class OutputKind(str, Enum):
    """Mean function realized by the sampled graph."""
    POISSON_MULTIGRAPH = "poisson-multigraph"
    THRESHOLDED_SIMPLE = "thresholded-simple"


@dataclass(frozen=True)
class GraphOptions:
    """Flags selecting the post-processing applied by sample_graph."""
    directed: bool = True
    allow_self_loops: bool = True
    output_kind: OutputKind = OutputKind.POISSON_MULTIGRAPH
    seed: int = 0
    parallel_blocks: bool = False

    def __post_init__(self):
        object.__setattr__(self, "output_kind", OutputKind(self.output_kind))
        # Thresholded output is always a simple graph
        if self.thresholded and (self.directed or self.allow_self_loops):
            logger.debug("Thresholded output: sampling undirected without self-loops")
            object.__setattr__(self, "directed", False)
            object.__setattr__(self, "allow_self_loops", False)
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"seed must fit in 64 bits, got {self.seed}")

    @property
    def thresholded(self) -> bool:
        return self.output_kind is OutputKind.THRESHOLDED_SIMPLE

    @classmethod
    def simple(cls, seed: int = 0, parallel_blocks: bool = False) -> "GraphOptions":
        """Undirected, loop-free, thresholded: a simple graph."""
        return cls(
            directed=False,
            allow_self_loops=False,
            output_kind=OutputKind.THRESHOLDED_SIMPLE,
            seed=seed,
            parallel_blocks=parallel_blocks,
        )


@dataclass(frozen=True, eq=False)
class EdgeList:
    """
    Multiset of edges in coordinate form.

    Edge t is (sources[t], targets[t]); duplicates are multi-edges.
    Undirected lists store every edge with source <= target.
    """
    n: int
    d: int
    sources: np.ndarray
    targets: np.ndarray
    directed: bool = True

    def __post_init__(self):
        sources = np.ascontiguousarray(self.sources, dtype=np.int64)
        targets = np.ascontiguousarray(self.targets, dtype=np.int64)
        if sources.shape != targets.shape or sources.ndim != 1:
            raise InvalidArgumentError("sources and targets must be equal-length vectors")
        if sources.size and (sources.min() < 0 or sources.max() >= self.n):
            raise IndexOutOfRangeError(f"source index outside [0, {self.n})")
        if targets.size and (targets.min() < 0 or targets.max() >= self.d):
            raise IndexOutOfRangeError(f"target index outside [0, {self.d})")
        sources.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return int(self.sources.shape[0])

    @classmethod
    def empty(cls, n: int, d: int, directed: bool = True) -> "EdgeList":
        none = np.empty(0, dtype=np.int64)
        return cls(n=n, d=d, sources=none, targets=none, directed=directed)

    def multiplicities(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct (source, target) pairs sorted lexicographically, and their counts."""
        if len(self) == 0:
            return np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64)
        pairs = np.column_stack([self.sources, self.targets])
        return np.unique(pairs, axis=0, return_counts=True)

    def self_loop_count(self) -> int:
        return int(np.count_nonzero(self.sources == self.targets))

    def to_sparse(self) -> sparse.csr_matrix:
        """n x d count matrix in stored orientation (duplicates summed)."""
        ones = np.ones(len(self), dtype=np.int64)
        return sparse.coo_matrix(
            (ones, (self.sources, self.targets)), shape=(self.n, self.d)
        ).tocsr()

    def to_dense(self) -> np.ndarray:
        """Dense n x d count matrix; for small graphs only."""
        if self.n * self.d > DENSE_CELL_LIMIT:
            raise TooLargeError(f"dense view of {self.n}x{self.d} exceeds the cell limit")
        counts = np.zeros((self.n, self.d), dtype=np.int64)
        np.add.at(counts, (self.sources, self.targets), 1)
        return counts


@dataclass(frozen=True, eq=False)
class BlockCounts:
    """Allocation of the m edges to (u, v) blocks."""
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class SamplingTables:
    """
    Alias tables for one NormalizedModel.

    blocks draws a row-major (u, v) index; sources[u] / targets[v] are None
    for empty columns, which carry zero block mass.
    """
    blocks: Optional[alias.AliasTable]
    sources: tuple[Optional[alias.AliasTable], ...]
    targets: tuple[Optional[alias.AliasTable], ...]
    ky: int


# ============================================
# RANDOM STREAMS
# ============================================


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def block_rng(seed: int, u: int, v: int) -> np.random.Generator:
    """Independent PCG64 stream for block (u, v), derived from seed."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(u, v)))
    )


def membership_rng(seed: int) -> np.random.Generator:
    """Stream for random memberships, apart from the main and block streams."""
    if not 0 <= seed < 2**64:
        raise InvalidArgumentError(f"seed must fit in 64 bits, got {seed}")
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(MEMBERSHIP_STREAM,)))
    )


def build_tables(norm: NormalizedModel) -> SamplingTables:
    """Build the block table and one alias table per non-empty column."""
    blocks = None
    if norm.lambda_total > 0:
        blocks = alias.build(norm.Stilde.ravel())

    sources = tuple(
        None if empty else alias.build(norm.Xtilde[:, u])
        for u, empty in enumerate(norm.x_empty)
    )
    if norm.square:
        targets = sources
    else:
        targets = tuple(
            None if empty else alias.build(norm.Ytilde[:, v])
            for v, empty in enumerate(norm.y_empty)
        )

    logger.debug(
        f"Built tables: {len(sources)} source columns, {len(targets)} target columns"
    )
    return SamplingTables(
        blocks=blocks, sources=sources, targets=targets, ky=norm.Stilde.shape[1]
    )


# ============================================
# SAMPLING STEPS
# ============================================


def _poisson(rate: float, rng: np.random.Generator) -> int:
    if rate > MAX_TOTAL_RATE:
        raise ModelTooLargeError(f"total rate {rate:.3g} exceeds 2^62")
    if rate <= 0:
        return 0
    return int(rng.poisson(rate))


def sample_edge_count(norm: NormalizedModel, rng: np.random.Generator) -> int:
    """m ~ Poisson(sum(Stilde))."""
    return _poisson(norm.lambda_total, rng)


def sample_block_counts(
    norm: NormalizedModel, m: int, rng: np.random.Generator
) -> BlockCounts:
    """Split m edges over blocks: Multinomial(m, Stilde / sum(Stilde))."""
    if m < 0:
        raise InvalidArgumentError(f"edge count must be non-negative, got {m}")

    shape = norm.Stilde.shape
    if m == 0:
        return BlockCounts(counts=np.zeros(shape, dtype=np.int64))
    if norm.lambda_total == 0:
        raise DegenerateModelError("cannot place edges in a model with zero rate")

    # numpy's multinomial conditions binomials cell by cell in this order.
    counts = rng.multinomial(m, norm.block_probabilities.ravel())
    return BlockCounts(counts=counts.reshape(shape).astype(np.int64))


def _draw_block(
    tables: SamplingTables,
    u: int,
    v: int,
    count: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    sources = tables.sources[u].draw_many(count, rng)
    targets = tables.targets[v].draw_many(count, rng)
    return sources, targets


def sample_edges(
    norm: NormalizedModel,
    counts: BlockCounts,
    rng: np.random.Generator,
    tables: Optional[SamplingTables] = None,
    block_seed: Optional[int] = None,
) -> EdgeList:
    """
    Draw counts[u, v] edges per block, sources from Xtilde[:, u] and
    targets from Ytilde[:, v].

    Blocks are visited in row-major order and the t-th source pairs with
    the t-th target. With block_seed set, block (u, v) uses its own stream
    block_rng(block_seed, u, v) and blocks run on a thread pool; the output
    is identical for any worker count.
    """
    if tables is None:
        tables = build_tables(norm)

    n, d = norm.Xtilde.shape[0], norm.Ytilde.shape[0]
    directed = True
    if counts.total == 0:
        return EdgeList.empty(n, d, directed)

    blocks = [
        (int(u), int(v), int(counts.counts[u, v]))
        for u, v in np.argwhere(counts.counts > 0)
    ]
    logger.debug(f"Sampling {counts.total} edges over {len(blocks)} blocks")

    if block_seed is None:
        parts = [_draw_block(tables, u, v, c, rng) for u, v, c in blocks]
    else:
        def run(block: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
            u, v, c = block
            return _draw_block(tables, u, v, c, block_rng(block_seed, u, v))

        with ThreadPoolExecutor(max_workers=max(BLOCK_WORKERS, 1)) as pool:
            parts = list(pool.map(run, blocks))

    sources = np.concatenate([p[0] for p in parts])
    targets = np.concatenate([p[1] for p in parts])
    return EdgeList(n=n, d=d, sources=sources, targets=targets, directed=directed)


# ============================================
# SINGLE EDGES AND THE EDGE STREAM
# ============================================


def _edges_from_uniforms(
    tables: SamplingTables, uniforms: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Turn (count, 3) uniforms into edges: column 0 block, 1 source, 2 target."""
    block = tables.blocks.lookup(uniforms[:, 0])
    u, v = np.divmod(block, tables.ky)

    sources = np.empty(block.shape[0], dtype=np.int64)
    targets = np.empty(block.shape[0], dtype=np.int64)
    for k in np.unique(u):
        mask = u == k
        sources[mask] = tables.sources[k].lookup(uniforms[mask, 1])
    for k in np.unique(v):
        mask = v == k
        targets[mask] = tables.targets[k].lookup(uniforms[mask, 2])
    return sources, targets


def _require_positive(norm: NormalizedModel) -> None:
    if norm.lambda_total <= 0:
        raise DegenerateModelError("single-edge sampling needs a positive total rate")


def sample_single_edges(
    norm: NormalizedModel,
    count: int,
    rng: np.random.Generator,
    tables: Optional[SamplingTables] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw count i.i.d. edges with P((I, J) = (i, j)) proportional to lambda_ij.

    Consumes three doubles per edge in (block, source, target) order, so
    the result equals count calls of sample_single_edge.
    """
    _require_positive(norm)
    if tables is None:
        tables = build_tables(norm)
    if count == 0:
        none = np.empty(0, dtype=np.int64)
        return none, none
    return _edges_from_uniforms(tables, rng.random((count, 3)))


def sample_single_edge(
    norm: NormalizedModel,
    rng: np.random.Generator,
    tables: Optional[SamplingTables] = None,
) -> tuple[int, int]:
    """One edge (I, J) drawn with probability proportional to lambda_ij."""
    sources, targets = sample_single_edges(norm, 1, rng, tables)
    return int(sources[0]), int(targets[0])


def sample_edges_naive(
    norm: NormalizedModel,
    m: int,
    rng: np.random.Generator,
    tables: Optional[SamplingTables] = None,
) -> EdgeList:
    """Reference sampler: m independent (U, V, I, J) draws, no block counts."""
    n, d = norm.Xtilde.shape[0], norm.Ytilde.shape[0]
    if m == 0:
        return EdgeList.empty(n, d)
    sources, targets = sample_single_edges(norm, m, rng, tables)
    return EdgeList(n=n, d=d, sources=sources, targets=targets)


def sample_edge_stream(
    model: FactorModel, rng: np.random.Generator
) -> Iterator[tuple[int, int]]:
    """
    Unbounded i.i.d. edge stream (edge-exchangeable growth).

    The first k edges equal k calls of sample_single_edge on the same seed.
    """
    norm = normalize(model)
    _require_positive(norm)
    tables = build_tables(norm)

    def stream() -> Iterator[tuple[int, int]]:
        while True:
            sources, targets = _edges_from_uniforms(
                tables, rng.random((STREAM_CHUNK, 3))
            )
            yield from zip(sources.tolist(), targets.tolist())

    return stream()


# ============================================
# FULL PIPELINE
# ============================================


def _resample_self_loops(
    edges: EdgeList,
    norm: NormalizedModel,
    tables: SamplingTables,
    rng: np.random.Generator,
) -> EdgeList:
    """Redraw the whole (U, V, I, J) tuple of every self-loop until none is left."""
    sources = edges.sources.copy()
    targets = edges.targets.copy()
    pending = np.flatnonzero(sources == targets)

    rounds = 0
    while pending.size:
        rounds += 1
        if rounds > REJECTION_CAP:
            raise RejectionStallError(
                f"{pending.size} edges still self-loops after {REJECTION_CAP} redraws"
            )
        new_sources, new_targets = _edges_from_uniforms(
            tables, rng.random((pending.size, 3))
        )
        sources[pending] = new_sources
        targets[pending] = new_targets
        pending = pending[new_sources == new_targets]

    if rounds:
        logger.debug(f"Self-loop rejection finished after {rounds} rounds")
    return EdgeList(n=edges.n, d=edges.d, sources=sources, targets=targets)


def sample_graph(
    model: FactorModel,
    options: Optional[GraphOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> EdgeList:
    """
    Sample a graph and apply the post-processing the options ask for.

    - directed with self-loops: the multigraph as sampled
    - undirected: sample with S/2, then drop edge directions
    - no self-loops: m ~ Poisson(loopless rate), self-loops redrawn
    - thresholded: collapse multi-edges last

    Args:
        model: Validated factor model
        options: Graph flags (defaults to a directed Poisson multigraph)
        rng: Generator for the main stream; defaults to make_rng(options.seed)

    Returns:
        Post-processed EdgeList
    """
    from postprocess import symmetrize, threshold

    options = options or GraphOptions()
    rng = rng if rng is not None else make_rng(options.seed)

    if not (options.directed and options.allow_self_loops) and not model.square:
        raise NotSquareError("undirected or loop-free sampling needs Y = X")

    working = model if options.directed else model.with_mixing(model.S / 2)
    norm = normalize(working)
    tables = build_tables(norm)

    if options.allow_self_loops:
        m = sample_edge_count(norm, rng)
    else:
        m = _poisson(loopless_rate(working), rng)
    logger.info(f"Sampling {m} edges (expected {norm.lambda_total:.6g})")

    counts = sample_block_counts(norm, m, rng)
    block_seed = options.seed if options.parallel_blocks else None
    edges = sample_edges(norm, counts, rng, tables=tables, block_seed=block_seed)

    if not options.allow_self_loops:
        edges = _resample_self_loops(edges, norm, tables, rng)
    if not options.directed:
        edges = symmetrize(edges)
    if options.thresholded:
        edges = threshold(edges)
    return edges
