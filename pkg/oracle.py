"""
fastrg Oracle

Reference samplers that check the fast path: the element-wise O(n d)
Poisson sampler, the uniform coupling between the thresholded Poisson
graph and the Bernoulli graph, and chi-square helpers comparing samples.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from errors import InvalidArgumentError, ProbabilityOverflowError, TooLargeError
from model import DENSE_CELL_LIMIT, FactorModel, expected_edge_count, rate_matrix

logger = logging.getLogger(__name__)

# Below this rate the Taylor series of lambda - (1 - e^-lambda) is used.
SERIES_CUTOFF = 1e-4


@dataclass(frozen=True, eq=False)
class CoupledPair:
    """t(A) and B built from one shared uniform per coupled cell."""
    thresholded: np.ndarray
    bernoulli: np.ndarray
    uniforms_used: int

    @property
    def disagreements(self) -> int:
        """Squared Frobenius distance of two binary matrices."""
        return int(np.count_nonzero(self.thresholded != self.bernoulli))


def _guard_dense(model: FactorModel, reps: int = 1) -> None:
    cells = model.n * model.d * reps
    if cells > DENSE_CELL_LIMIT:
        raise TooLargeError(
            f"dense sampling needs {cells} cells, limit is {DENSE_CELL_LIMIT}"
        )


def dense_poisson_sample(model: FactorModel, rng: np.random.Generator) -> np.ndarray:
    """Independent A_ij ~ Poisson(lambda_ij) for every cell."""
    _guard_dense(model)
    return rng.poisson(rate_matrix(model)).astype(np.int64)


def dense_poisson_samples(
    model: FactorModel, reps: int, rng: np.random.Generator
) -> np.ndarray:
    """reps independent dense Poisson samples, shape (reps, n, d)."""
    if reps < 0:
        raise InvalidArgumentError(f"reps must be non-negative, got {reps}")
    _guard_dense(model, reps)
    rates = rate_matrix(model)
    return rng.poisson(rates, size=(reps, *rates.shape)).astype(np.int64)


def coupled_pair(
    model: FactorModel, rng: np.random.Generator, undirected: bool = False
) -> CoupledPair:
    """
    Couple t(A) and B on shared uniforms.

    thresholded_ij = 1 iff U_ij < 1 - e^-lambda_ij and bernoulli_ij = 1 iff
    U_ij < lambda_ij, so the marginals are Bernoulli(1 - e^-lambda) and
    Bernoulli(lambda) and thresholded <= bernoulli everywhere.
    """
    _guard_dense(model)
    rates = rate_matrix(model)
    if (rates > 1).any():
        i, j = (int(k) for k in np.argwhere(rates > 1)[0])
        raise ProbabilityOverflowError(f"lambda[{i},{j}]={rates[i, j]:.6g} exceeds 1")

    if undirected:
        if not model.square:
            raise InvalidArgumentError("undirected coupling needs a square model")
        rows, cols = np.triu_indices(model.n)
        upper = rng.random(rows.shape[0])
        uniforms = np.empty_like(rates)
        uniforms[rows, cols] = upper
        uniforms[cols, rows] = upper
        used = int(upper.shape[0])
    else:
        uniforms = rng.random(rates.shape)
        used = int(uniforms.size)

    return CoupledPair(
        thresholded=(uniforms < -np.expm1(-rates)).astype(np.int8),
        bernoulli=(uniforms < rates).astype(np.int8),
        uniforms_used=used,
    )


def _poisson_bernoulli_gap(rates: np.ndarray) -> np.ndarray:
    """lambda - (1 - e^-lambda) elementwise, stable near zero."""
    series = rates**2 / 2 - rates**3 / 6 + rates**4 / 24
    direct = rates + np.expm1(-rates)
    return np.where(rates < SERIES_CUTOFF, series, direct)


def discrepancy_expectation(model: FactorModel) -> float:
    """E||t(A) - B||_F^2 under the coupling: sum of lambda - (1 - e^-lambda)."""
    return float(_poisson_bernoulli_gap(rate_matrix(model)).sum())


def relative_discrepancy(model: FactorModel) -> float:
    """E||t(A) - B||_F^2 / E||B||_F^2, where E||B||_F^2 = sum of lambda."""
    total = expected_edge_count(model)
    if total == 0:
        return 0.0
    return discrepancy_expectation(model) / total


# ============================================
# SAMPLE COMPARISONS
# ============================================


def count_category_table(samples: np.ndarray, max_count: int = 3) -> np.ndarray:
    """
    Per-cell histogram of counts over {0, 1, ..., max_count+}.

    Args:
        samples: (reps, n, d) count tensor

    Returns:
        (n * d, max_count + 1) table, cells in row-major order
    """
    capped = np.minimum(samples.reshape(samples.shape[0], -1), max_count)
    table = np.zeros((capped.shape[1], max_count + 1), dtype=np.int64)
    for category in range(max_count + 1):
        table[:, category] = (capped == category).sum(axis=0)
    return table


def cellwise_equivalence_pvalues(
    first: np.ndarray, second: np.ndarray, max_count: int = 3
) -> np.ndarray:
    """
    Two-sample chi-square p-value per cell over count categories.

    Categories empty in both samples are dropped; a cell whose pooled
    samples use a single category gets p-value 1.
    """
    table_a = count_category_table(first, max_count)
    table_b = count_category_table(second, max_count)

    pvalues = np.ones(table_a.shape[0])
    for cell in range(table_a.shape[0]):
        contingency = np.vstack([table_a[cell], table_b[cell]])
        contingency = contingency[:, contingency.sum(axis=0) > 0]
        if contingency.shape[1] < 2:
            continue
        pvalues[cell] = stats.chi2_contingency(contingency, correction=False).pvalue
    return pvalues


def _compositions(total: int, parts: int):
    """All non-negative integer vectors of length parts summing to total."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1, *bars, total + parts - 1)
        yield tuple(edges[k + 1] - edges[k] - 1 for k in range(parts))


def multinomial_gof_pvalue(
    cell_counts: np.ndarray, probabilities: np.ndarray, min_expected: float = 5.0
) -> float:
    """
    Chi-square goodness of fit of count vectors against Multinomial(m, p).

    Args:
        cell_counts: (reps, cells) integer rows that all sum to the same m
        probabilities: Cell probabilities

    Outcomes with expected frequency below min_expected are pooled.
    """
    rows = np.asarray(cell_counts, dtype=np.int64)
    p = np.asarray(probabilities, dtype=np.float64).ravel()
    p = p / p.sum()
    m = int(rows[0].sum())
    if (rows.sum(axis=1) != m).any():
        raise InvalidArgumentError("all count vectors must share one total")

    outcomes = list(_compositions(m, p.size))
    index = {outcome: k for k, outcome in enumerate(outcomes)}
    observed = np.zeros(len(outcomes))
    for row in map(tuple, rows.tolist()):
        observed[index[row]] += 1

    log_p = np.log(np.where(p > 0, p, 1.0))
    expected = np.empty(len(outcomes))
    for k, outcome in enumerate(outcomes):
        if any(c > 0 and q == 0 for c, q in zip(outcome, p)):
            expected[k] = 0.0
            continue
        log_coef = math.lgamma(m + 1) - sum(math.lgamma(c + 1) for c in outcome)
        expected[k] = math.exp(log_coef + float(np.dot(outcome, log_p)))
    expected *= rows.shape[0]

    rare = expected < min_expected
    kept_obs = list(observed[~rare])
    kept_exp = list(expected[~rare])
    if rare.any() and expected[rare].sum() > 0:
        kept_obs.append(observed[rare].sum())
        kept_exp.append(expected[rare].sum())

    logger.debug(f"Multinomial GOF over {len(kept_obs)} pooled outcomes")
    return float(stats.chisquare(kept_obs, kept_exp).pvalue)
