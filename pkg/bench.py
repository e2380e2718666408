"""
fastrg Bench Harness

Run-time scaling experiment: for each (n, E(m)) grid point, build X with
i.i.d. Poisson(1) entries (K = 5) and S with i.i.d. Uniform[0, 1] entries,
rescale to avg_deg = E(m) / n, and time edge-list generation of the
directed multigraph with self-loops. Model construction, table building
and output are outside the timed region.
"""

import csv
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from errors import InvalidArgumentError, ResourceLimitError
from model import normalize, scale_to_avg_degree, validate
from sampler import build_tables, sample_block_counts, sample_edge_count, sample_edges

logger = logging.getLogger(__name__)

# Configuration
BENCH_MAX_FACTOR_CELLS = int(os.getenv("FASTRG_BENCH_MAX_FACTOR_CELLS", str(5 * 10**7)))
BENCH_K = 5
MODEL_KIND = "poisson-x-uniform-s"


@dataclass
class BenchRecord:
    """One timed sample."""
    n: int
    expected_m: int
    actual_m: int
    elapsed_seconds: float
    seed: int
    model_kind: str = MODEL_KIND


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


def _point_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _bench_point(point: int, n: int, expected_m: int, reps: int, seed: int) -> list[BenchRecord]:
    """Build one model and time reps samples of it."""
    if n * BENCH_K > BENCH_MAX_FACTOR_CELLS:
        raise ResourceLimitError(
            f"n={n} needs {n * BENCH_K} factor cells, cap is {BENCH_MAX_FACTOR_CELLS}"
        )

    model_rng = _point_rng(seed, point, 0)
    X = model_rng.poisson(1.0, size=(n, BENCH_K)).astype(np.float64)
    S = model_rng.uniform(0.0, 1.0, size=(BENCH_K, BENCH_K))
    model = scale_to_avg_degree(validate(X, S), expected_m / n)

    norm = normalize(model)
    tables = build_tables(norm)

    records = []
    for rep in range(reps):
        rng = _point_rng(seed, point, 1, rep)

        start = time.perf_counter()
        m = sample_edge_count(norm, rng)
        counts = sample_block_counts(norm, m, rng)
        edges = sample_edges(norm, counts, rng, tables=tables)
        elapsed = time.perf_counter() - start

        if abs(len(edges) - expected_m) > 6 * math.sqrt(expected_m):
            logger.warning(
                f"n={n}: sampled {len(edges)} edges, expected {expected_m} "
                f"(outside 6 standard deviations)"
            )
        logger.info(f"n={n} E(m)={expected_m} rep={rep}: {len(edges)} edges in {elapsed:.4f}s")
        records.append(
            BenchRecord(
                n=n,
                expected_m=expected_m,
                actual_m=len(edges),
                elapsed_seconds=elapsed,
                seed=seed,
            )
        )
    return records


def run_bench(
    n_grid: Sequence[int],
    expected_m_grid: Sequence[int],
    reps: int = 3,
    seed: int = 0,
    parallel: bool = False,
    max_workers: Optional[int] = None,
) -> list[BenchRecord]:
    """
    Time the sampler over every (n, E(m)) pair.

    Args:
        n_grid: Node counts
        expected_m_grid: Expected edge counts
        reps: Samples per grid point
        seed: Root seed; point p uses streams (seed, p, 0) for the model
            and (seed, p, 1, rep) for sampling
        parallel: Spread grid points over worker processes
        max_workers: Process pool size when parallel

    Returns:
        Records in grid order (n outer, E(m) inner)
    """
    if not n_grid or not expected_m_grid:
        raise InvalidArgumentError("bench grids must be non-empty")
    if reps < 0:
        raise InvalidArgumentError(f"reps must be non-negative, got {reps}")
    if any(n < 1 for n in n_grid) or any(m < 1 for m in expected_m_grid):
        raise InvalidArgumentError("grid values must be positive")
    if reps == 0:
        return []

    points = [
        (point, n, m, reps, seed)
        for point, (n, m) in enumerate((n, m) for n in n_grid for m in expected_m_grid)
    ]
    logger.info(f"Running {len(points)} bench points x {reps} reps")

    if parallel:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_bench_point, *zip(*points)))
    else:
        results = [_bench_point(*args) for args in points]

    return [record for batch in results for record in batch]


def write_bench_csv(records: Iterable[BenchRecord], handle: TextIO = sys.stdout) -> None:
    """CSV with one header row: n,expected_m,actual_m,elapsed_seconds,seed,model_kind."""
    writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(asdict(record))


def fit_loglog_slopes(records: Sequence[BenchRecord], by: str = "expected_m") -> dict[int, float]:
    """
    Least-squares slope of log10(time) against log10(by).

    by="expected_m" groups by n (time vs E(m) at fixed n); by="n" groups by
    E(m). Groups with fewer than two distinct x values are skipped.
    """
    if by not in ("expected_m", "n"):
        raise InvalidArgumentError(f"by must be 'expected_m' or 'n', got {by!r}")
    group_key = "n" if by == "expected_m" else "expected_m"

    groups: dict[int, list[BenchRecord]] = {}
    for record in records:
        groups.setdefault(getattr(record, group_key), []).append(record)

    slopes = {}
    for key, group in sorted(groups.items()):
        x = np.log10([getattr(r, by) for r in group])
        y = np.log10([max(r.elapsed_seconds, 1e-9) for r in group])
        if np.unique(x).size < 2:
            continue
        slopes[key] = float(np.polyfit(x, y, 1)[0])
        logger.info(f"{group_key}={key}: log-log slope vs {by} = {slopes[key]:.3f}")
    return slopes
