"""
fastrg File Formats

Factor matrices in, edge lists out:
- dense CSV and Matrix Market for X, S, Y
- TSV (0-based, one line per distinct pair) and Matrix Market coordinate
  (1-based, symmetric when undirected) for edge lists
"""

import csv
import logging
import os
import re
import tempfile
from contextlib import contextmanager
from typing import Generator, Optional, TextIO

import numpy as np
from scipy import io as spio
from scipy import sparse

from errors import InvalidArgumentError, ParseError
from sampler import EdgeList

logger = logging.getLogger(__name__)

MATRIX_FORMATS = ("dense-csv", "matrix-market")
# "matrix-market" is accepted as a short alias of the coordinate format
EDGE_FORMATS = ("tsv", "matrix-market-coordinate", "matrix-market")

HEADER_PATTERN = re.compile(r"#\s*fastrg n=(\d+) d=(\d+) directed=([01])")


def infer_matrix_format(path: str) -> str:
    """Matrix Market for .mtx files, dense CSV otherwise."""
    return "matrix-market" if path.lower().endswith(".mtx") else "dense-csv"


def _edge_header(edges: EdgeList) -> str:
    return f"fastrg n={edges.n} d={edges.d} directed={int(edges.directed)}"


@contextmanager
def _atomic_output(path: str, mode: str = "w") -> Generator[TextIO, None, None]:
    """Write to a temp file next to path and rename it into place on success."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".fastrg-", dir=directory)
    try:
        with os.fdopen(fd, mode) as handle:
            yield handle
        os.replace(tmp_path, path)
    except Exception as e:
        logger.error(f"Failed to write {path}: {e}")
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


# ============================================
# FACTOR MATRICES
# ============================================


def _read_dense_csv(path: str) -> np.ndarray:
    rows: list[list[float]] = []
    width: Optional[int] = None

    with open(path, newline="") as handle:
        for line_no, record in enumerate(csv.reader(handle), start=1):
            if not record or record[0].lstrip().startswith("#"):
                continue
            if all(not cell.strip() for cell in record):
                continue

            values = []
            for col_no, cell in enumerate(record, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"not a number: {cell!r}", path=path, line=line_no, column=col_no
                    ) from None

            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(
                    f"row {line_no} has {len(values)} values, expected {width}",
                    path=path,
                    line=line_no,
                )
            rows.append(values)

    if not rows:
        raise ParseError("no matrix rows found", path=path)
    return np.array(rows, dtype=np.float64)


def _read_matrix_market(path: str) -> np.ndarray:
    try:
        matrix = spio.mmread(path)
    except (ValueError, IndexError, OSError) as e:
        raise ParseError(f"invalid Matrix Market file: {e}", path=path) from e

    if sparse.issparse(matrix):
        matrix = matrix.toarray()
    return np.asarray(matrix, dtype=np.float64)


def read_factor_matrix(path: str, format: Optional[str] = None) -> np.ndarray:
    """
    Read a dense factor matrix.

    Args:
        path: File path
        format: "dense-csv" or "matrix-market"; inferred from the extension if None

    Returns:
        Dense float matrix (sign checks are left to model.validate)
    """
    format = format or infer_matrix_format(path)
    if format not in MATRIX_FORMATS:
        raise InvalidArgumentError(f"unknown matrix format {format!r}")

    if format == "dense-csv":
        matrix = _read_dense_csv(path)
    else:
        matrix = _read_matrix_market(path)

    logger.info(f"Read {matrix.shape[0]}x{matrix.shape[1]} matrix from {path}")
    return matrix


# ============================================
# EDGE LISTS
# ============================================


def _write_tsv(edges: EdgeList, handle: TextIO) -> None:
    pairs, counts = edges.multiplicities()
    rows = np.column_stack([pairs, counts]) if counts.size else np.empty((0, 3), dtype=np.int64)
    np.savetxt(
        handle,
        rows,
        fmt="%d",
        delimiter="\t",
        header=_edge_header(edges),
        comments="# ",
    )


def _write_matrix_market(edges: EdgeList, handle: TextIO) -> None:
    pairs, counts = edges.multiplicities()
    rows, cols = pairs[:, 0], pairs[:, 1]
    symmetry = "general"
    if not edges.directed:
        # Symmetric Matrix Market stores the lower triangle.
        rows, cols = cols, rows
        symmetry = "symmetric"

    matrix = sparse.coo_matrix((counts, (rows, cols)), shape=(edges.n, edges.d))
    spio.mmwrite(
        handle,
        matrix,
        comment=_edge_header(edges),
        field="integer",
        symmetry=symmetry,
    )


def write_edge_list(edges: EdgeList, path: str, format: str = "tsv") -> None:
    """
    Write an edge list.

    Args:
        edges: Edge list to write
        path: Output file path
        format: "tsv" (0-based) or "matrix-market-coordinate" (1-based)
    """
    if format not in EDGE_FORMATS:
        raise InvalidArgumentError(f"unknown edge list format {format!r}")

    mode = "w" if format == "tsv" else "wb"
    with _atomic_output(path, mode) as handle:
        if format == "tsv":
            _write_tsv(edges, handle)
        else:
            _write_matrix_market(edges, handle)

    logger.info(f"Wrote {len(edges)} edges to {path} ({format})")


def _read_tsv(path: str) -> EdgeList:
    with open(path) as handle:
        first = handle.readline()
    match = HEADER_PATTERN.match(first.strip())
    if not match:
        raise ParseError("missing fastrg header line", path=path, line=1)
    n, d, directed = int(match.group(1)), int(match.group(2)), match.group(3) == "1"

    try:
        rows = np.loadtxt(path, dtype=np.int64, comments="#", delimiter="\t", ndmin=2)
    except ValueError as e:
        raise ParseError(f"invalid edge row: {e}", path=path) from e

    if rows.size == 0:
        return EdgeList.empty(n, d, directed)
    if rows.shape[1] != 3:
        raise ParseError(f"edge rows need 3 columns, got {rows.shape[1]}", path=path)

    sources = np.repeat(rows[:, 0], rows[:, 2])
    targets = np.repeat(rows[:, 1], rows[:, 2])
    return EdgeList(n=n, d=d, sources=sources, targets=targets, directed=directed)


def _read_edge_matrix_market(path: str) -> EdgeList:
    try:
        symmetry = spio.mminfo(path)[5]
        matrix = sparse.coo_matrix(spio.mmread(path))
    except (ValueError, IndexError, OSError) as e:
        raise ParseError(f"invalid Matrix Market file: {e}", path=path) from e

    directed = symmetry == "general"
    rows, cols, counts = matrix.row, matrix.col, matrix.data.astype(np.int64)
    if not directed:
        # mmread mirrors symmetric files; keep one copy per pair.
        upper = rows <= cols
        rows, cols, counts = rows[upper], cols[upper], counts[upper]

    n, d = matrix.shape
    return EdgeList(
        n=n,
        d=d,
        sources=np.repeat(rows, counts),
        targets=np.repeat(cols, counts),
        directed=directed,
    )


def read_edge_list(path: str, format: str = "tsv") -> EdgeList:
    """Read an edge list written by write_edge_list."""
    if format not in EDGE_FORMATS:
        raise InvalidArgumentError(f"unknown edge list format {format!r}")
    if format == "tsv":
        return _read_tsv(path)
    return _read_edge_matrix_market(path)
