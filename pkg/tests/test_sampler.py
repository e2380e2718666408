"""
Tests for the sampler.

Test cases:
- GraphOptions / EdgeList containers
- sample_edge_count, sample_block_counts, sample_edges
- single-edge draws and the edge stream
- sample_graph: determinism, parallel blocks, self-loop rejection, undirected
- distribution checks against independent dense Poisson draws
"""

from itertools import islice

import numpy as np
import pytest
from scipy import stats

import sampler
from errors import (
    DegenerateModelError,
    IndexOutOfRangeError,
    InvalidArgumentError,
    ModelTooLargeError,
    NotSquareError,
    RejectionStallError,
)
from model import loopless_rate, normalize, rate_matrix, validate
from oracle import cellwise_equivalence_pvalues, dense_poisson_samples, multinomial_gof_pvalue
from sampler import (
    EdgeList,
    GraphOptions,
    OutputKind,
    build_tables,
    make_rng,
    sample_block_counts,
    sample_edge_count,
    sample_edge_stream,
    sample_edges,
    sample_edges_naive,
    sample_graph,
    sample_single_edge,
    sample_single_edges,
)


@pytest.fixture
def small_model():
    """4 nodes, 2 blocks, mixed positive rates."""
    X = [[1.0, 0.2], [0.5, 0.5], [0.0, 1.0], [0.3, 0.0]]
    S = [[0.8, 0.3], [0.1, 0.6]]
    return validate(X, S)


@pytest.fixture
def rect_model():
    """3 x 5 rectangular model."""
    X = [[1.0, 0.0], [0.5, 2.0], [0.0, 1.0]]
    S = [[1.0, 0.5], [0.2, 0.7]]
    Y = [[1.0, 1.0], [0.0, 2.0], [3.0, 0.0], [0.5, 0.5], [1.0, 0.0]]
    return validate(X, S, Y)


def dense_counts(edge_lists):
    """Stack edge lists into a (reps, n, d) count tensor."""
    return np.stack([edges.to_dense() for edges in list(edge_lists)])


class TestGraphOptions:
    """Tests for GraphOptions."""

    def test_defaults(self):
        """Test that the default is a directed Poisson multigraph."""
        options = GraphOptions()

        assert options.directed
        assert options.allow_self_loops
        assert options.output_kind is OutputKind.POISSON_MULTIGRAPH
        assert not options.thresholded

    def test_simple(self):
        """Test the simple-graph preset."""
        options = GraphOptions.simple(seed=9)

        assert not options.directed
        assert not options.allow_self_loops
        assert options.thresholded
        assert options.seed == 9

    def test_output_kind_from_string(self):
        """Test that output_kind accepts its string value."""
        options = GraphOptions(output_kind="thresholded-simple")

        assert options.output_kind is OutputKind.THRESHOLDED_SIMPLE

    def test_thresholded_forces_simple_flags(self):
        """Test that thresholded output is always undirected and loop-free."""
        options = GraphOptions(output_kind=OutputKind.THRESHOLDED_SIMPLE, seed=1)

        assert not options.directed
        assert not options.allow_self_loops
        assert options == GraphOptions.simple(seed=1)

    def test_seed_range(self):
        """Test that seeds must fit in 64 unsigned bits."""
        with pytest.raises(InvalidArgumentError):
            GraphOptions(seed=-1)
        with pytest.raises(InvalidArgumentError):
            GraphOptions(seed=2**64)
        assert GraphOptions(seed=2**64 - 1).seed == 2**64 - 1


class TestEdgeList:
    """Tests for EdgeList."""

    def test_out_of_range(self):
        """Test that indices are checked against n and d."""
        with pytest.raises(IndexOutOfRangeError):
            EdgeList(n=2, d=2, sources=[0, 2], targets=[0, 1])
        with pytest.raises(IndexOutOfRangeError):
            EdgeList(n=2, d=3, sources=[0], targets=[-1])

    def test_length_mismatch(self):
        """Test that sources and targets must align."""
        with pytest.raises(InvalidArgumentError):
            EdgeList(n=2, d=2, sources=[0, 1], targets=[0])

    def test_multiplicities(self):
        """Test distinct pairs and counts."""
        edges = EdgeList(n=3, d=3, sources=[2, 0, 2, 0], targets=[1, 1, 1, 0])
        pairs, counts = edges.multiplicities()

        assert pairs.tolist() == [[0, 0], [0, 1], [2, 1]]
        assert counts.tolist() == [1, 1, 2]

    def test_dense_and_sparse_agree(self):
        """Test that the sparse view sums duplicates like the dense one."""
        edges = EdgeList(n=2, d=3, sources=[0, 0, 1], targets=[2, 2, 0])

        np.testing.assert_array_equal(edges.to_sparse().toarray(), edges.to_dense())
        assert edges.to_dense()[0, 2] == 2

    def test_self_loop_count(self):
        """Test counting (i, i) edges."""
        edges = EdgeList(n=3, d=3, sources=[0, 1, 2], targets=[0, 2, 2])

        assert edges.self_loop_count() == 2

    def test_empty(self):
        """Test an empty list."""
        edges = EdgeList.empty(4, 4, directed=False)

        assert len(edges) == 0
        assert not edges.directed
        assert edges.multiplicities()[0].shape == (0, 2)


class TestEdgeCount:
    """Tests for sample_edge_count."""

    def test_zero_rate(self):
        """Test that a zero model gives m = 0."""
        norm = normalize(validate(np.eye(2), np.zeros((2, 2))))

        assert sample_edge_count(norm, make_rng(0)) == 0

    def test_too_large(self):
        """Test that a total rate above 2^62 is refused."""
        norm = normalize(validate([[1.0]], [[1e20]]))

        with pytest.raises(ModelTooLargeError):
            sample_edge_count(norm, make_rng(0))

    def test_mean(self, small_model):
        """Test that m averages to the total rate."""
        norm = normalize(small_model)
        rng = make_rng(5)
        draws = [sample_edge_count(norm, rng) for _ in range(4000)]

        tolerance = 4 * np.sqrt(norm.lambda_total / len(draws))
        assert abs(np.mean(draws) - norm.lambda_total) < tolerance


class TestBlockCounts:
    """Tests for sample_block_counts."""

    def test_sums_to_m(self, small_model):
        """Test that the allocation keeps every edge."""
        norm = normalize(small_model)
        counts = sample_block_counts(norm, 137, make_rng(1))

        assert counts.total == 137
        assert counts.counts.shape == (2, 2)

    def test_zero_m(self, small_model):
        """Test that m = 0 gives all-zero counts."""
        counts = sample_block_counts(normalize(small_model), 0, make_rng(1))

        assert counts.total == 0

    def test_zero_block_gets_nothing(self):
        """Test that blocks with zero Stilde never receive edges."""
        norm = normalize(validate(np.eye(2), [[1.0, 0.0], [0.0, 2.0]]))
        counts = sample_block_counts(norm, 1000, make_rng(2))

        assert counts.counts[0, 1] == 0
        assert counts.counts[1, 0] == 0

    def test_positive_m_on_zero_model(self):
        """Test that edges cannot be placed in a zero-rate model."""
        norm = normalize(validate(np.eye(2), np.zeros((2, 2))))

        with pytest.raises(DegenerateModelError):
            sample_block_counts(norm, 3, make_rng(0))

    def test_negative_m(self, small_model):
        """Test that m must be non-negative."""
        with pytest.raises(InvalidArgumentError):
            sample_block_counts(normalize(small_model), -1, make_rng(0))

    @pytest.mark.statistical
    def test_multinomial_fit(self, small_model):
        """Test block counts for m = 6 against Multinomial(6, Stilde / total)."""
        norm = normalize(small_model)
        rng = make_rng(77)
        rows = np.stack(
            [sample_block_counts(norm, 6, rng).counts.ravel() for _ in range(20_000)]
        )

        assert multinomial_gof_pvalue(rows, norm.block_probabilities) > 0.001


class TestSampleEdges:
    """Tests for sample_edges."""

    def test_block_membership(self):
        """Test that each block draws from its own columns."""
        X = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]
        norm = normalize(validate(X, [[1.0, 0.0], [0.0, 1.0]]))
        counts = sample_block_counts(norm, 500, make_rng(3))
        edges = sample_edges(norm, counts, make_rng(4))

        same_block = (edges.sources < 2) == (edges.targets < 2)
        assert same_block.all()
        assert len(edges) == 500

    def test_rectangular_ranges(self, rect_model):
        """Test that sources index rows of X and targets rows of Y."""
        norm = normalize(rect_model)
        counts = sample_block_counts(norm, 400, make_rng(0))
        edges = sample_edges(norm, counts, make_rng(1))

        assert edges.n == 3 and edges.d == 5
        assert edges.sources.max() < 3
        assert edges.targets.max() < 5

    def test_empty_allocation(self, small_model):
        """Test that zero counts give an empty list."""
        norm = normalize(small_model)
        counts = sample_block_counts(norm, 0, make_rng(0))

        assert len(sample_edges(norm, counts, make_rng(0))) == 0

    def test_block_seed_ignores_worker_count(self, small_model, monkeypatch):
        """Test that per-block streams give the same output on any pool size."""
        norm = normalize(small_model)
        counts = sample_block_counts(norm, 300, make_rng(6))

        results = []
        for workers in (1, 2, 8):
            monkeypatch.setattr(sampler, "BLOCK_WORKERS", workers)
            results.append(sample_edges(norm, counts, make_rng(0), block_seed=42))

        for edges in results[1:]:
            np.testing.assert_array_equal(edges.sources, results[0].sources)
            np.testing.assert_array_equal(edges.targets, results[0].targets)

    @pytest.mark.statistical
    def test_matches_naive(self, small_model):
        """Test blocked and naive sampling give the same pair distribution."""
        norm = normalize(small_model)
        tables = build_tables(norm)
        m = 50_000

        blocked = sample_edges(norm, sample_block_counts(norm, m, make_rng(10)), make_rng(11), tables)
        naive = sample_edges_naive(norm, m, make_rng(12), tables)

        cells = small_model.n * small_model.d
        table = np.vstack([
            np.bincount(blocked.sources * small_model.d + blocked.targets, minlength=cells),
            np.bincount(naive.sources * small_model.d + naive.targets, minlength=cells),
        ])
        table = table[:, table.sum(axis=0) > 0]
        assert stats.chi2_contingency(table, correction=False).pvalue > 0.001


class TestSingleEdge:
    """Tests for single-edge draws and the stream."""

    def test_batch_equals_loop(self, small_model):
        """Test that a batch draw equals repeated single draws."""
        norm = normalize(small_model)
        tables = build_tables(norm)
        rng_loop, rng_batch = make_rng(8), make_rng(8)

        looped = [sample_single_edge(norm, rng_loop, tables) for _ in range(100)]
        sources, targets = sample_single_edges(norm, 100, rng_batch, tables)

        assert looped == list(zip(sources.tolist(), targets.tolist()))

    def test_stream_prefix(self, small_model, monkeypatch):
        """Test that the stream's first k edges equal k single draws."""
        monkeypatch.setattr(sampler, "STREAM_CHUNK", 7)
        norm = normalize(small_model)
        rng = make_rng(21)
        expected = [sample_single_edge(norm, rng) for _ in range(30)]

        stream = sample_edge_stream(small_model, make_rng(21))
        assert [next(stream) for _ in range(30)] == expected

    def test_stream_zero_model(self):
        """Test that the stream refuses a zero-rate model up front."""
        with pytest.raises(DegenerateModelError):
            sample_edge_stream(validate(np.eye(2), np.zeros((2, 2))), make_rng(0))

    @pytest.mark.statistical
    def test_stream_positions_share_one_law(self, rect_model):
        """Test that edge 1 and edge 1000 of a stream have the same distribution."""
        first, thousandth = [], []
        for seed in range(3000):
            edges = list(islice(sample_edge_stream(rect_model, make_rng(seed)), 1000))
            first.append(edges[0])
            thousandth.append(edges[-1])

        cells = rect_model.n * rect_model.d

        def cell_counts(pairs):
            sources, targets = np.array(pairs).T
            return np.bincount(sources * rect_model.d + targets, minlength=cells)

        table = np.stack([cell_counts(first), cell_counts(thousandth)])
        table = table[:, table.sum(axis=0) > 0]
        assert stats.chi2_contingency(table, correction=False).pvalue > 0.001

    @pytest.mark.statistical
    def test_edge_frequencies(self, rect_model):
        """Test single-edge frequencies against lambda_ij / sum(lambda)."""
        norm = normalize(rect_model)
        draws = 200_000
        sources, targets = sample_single_edges(norm, draws, make_rng(31))

        rates = rate_matrix(rect_model).ravel()
        observed = np.bincount(sources * rect_model.d + targets, minlength=rates.size)
        positive = rates > 0
        assert observed[~positive].sum() == 0
        expected = draws * rates[positive] / rates.sum()
        assert stats.chisquare(observed[positive], expected).pvalue > 0.001


class TestSampleGraph:
    """Tests for sample_graph."""

    def test_deterministic(self, small_model):
        """Test that the same seed gives the same edge list."""
        first = sample_graph(small_model, GraphOptions(seed=123))
        second = sample_graph(small_model, GraphOptions(seed=123))

        np.testing.assert_array_equal(first.sources, second.sources)
        np.testing.assert_array_equal(first.targets, second.targets)

    def test_seeds_differ(self):
        """Test that different seeds give different graphs."""
        model = validate(np.ones((50, 1)), [[0.2]])
        first = sample_graph(model, GraphOptions(seed=1))
        second = sample_graph(model, GraphOptions(seed=2))

        assert (
            len(first) != len(second)
            or not np.array_equal(first.sources, second.sources)
        )

    def test_parallel_blocks_deterministic(self, small_model, monkeypatch):
        """Test that parallel block sampling is reproducible across pool sizes."""
        options = GraphOptions(seed=55, parallel_blocks=True)
        monkeypatch.setattr(sampler, "BLOCK_WORKERS", 1)
        first = sample_graph(small_model, options)
        monkeypatch.setattr(sampler, "BLOCK_WORKERS", 6)
        second = sample_graph(small_model, options)

        np.testing.assert_array_equal(first.sources, second.sources)
        np.testing.assert_array_equal(first.targets, second.targets)

    def test_zero_model(self):
        """Test that a zero-rate model samples the empty graph."""
        edges = sample_graph(validate(np.eye(3), np.zeros((3, 3))), GraphOptions(seed=0))

        assert len(edges) == 0
        assert edges.n == 3

    def test_no_self_loops(self, small_model):
        """Test that loop-free sampling never returns (i, i)."""
        for seed in range(20):
            edges = sample_graph(small_model, GraphOptions(allow_self_loops=False, seed=seed))
            assert edges.self_loop_count() == 0

    def test_single_node_loop_free(self):
        """Test that a one-node loop-free graph is empty."""
        edges = sample_graph(validate([[1.0]], [[5.0]]), GraphOptions(allow_self_loops=False))

        assert len(edges) == 0

    def test_loop_free_without_off_diagonal_mass(self, monkeypatch):
        """Test that large diagonal-only models sample the empty loop-free graph."""
        monkeypatch.setattr(sampler, "REJECTION_CAP", 10)
        rng = np.random.default_rng(14)
        for seed in range(20):
            X = np.diag(rng.uniform(0.1, 2.0, 5))
            S = np.diag(rng.uniform(0.1, 2.0, 5)) * 1e15
            edges = sample_graph(validate(X, S), GraphOptions(allow_self_loops=False, seed=seed))
            assert len(edges) == 0

    def test_rejection_stall(self, monkeypatch):
        """Test that the rejection loop gives up after the cap."""
        monkeypatch.setattr(sampler, "REJECTION_CAP", 0)
        model = validate(np.ones((2, 1)), [[50.0]])

        with pytest.raises(RejectionStallError):
            sample_graph(model, GraphOptions(allow_self_loops=False, seed=0))

    def test_undirected_orientation(self, small_model):
        """Test that undirected edges are stored with source <= target."""
        edges = sample_graph(small_model, GraphOptions(directed=False, seed=4))

        assert not edges.directed
        assert (edges.sources <= edges.targets).all()

    def test_simple_graph(self, small_model):
        """Test that the simple preset has no loops and no duplicates."""
        scaled = small_model.with_mixing(small_model.S * 20)
        edges = sample_graph(scaled, GraphOptions.simple(seed=3))

        assert edges.self_loop_count() == 0
        assert edges.multiplicities()[1].max(initial=1) == 1
        assert (edges.sources < edges.targets).all()

    def test_thresholded_output_is_simple(self):
        """Test that a thresholded sample of a dense model has no loops or reversed pairs."""
        model = validate(np.ones((3, 1)), [[2.0]])
        edges = sample_graph(model, GraphOptions(output_kind=OutputKind.THRESHOLDED_SIMPLE, seed=1))

        assert not edges.directed
        assert edges.self_loop_count() == 0
        assert (edges.sources < edges.targets).all()
        assert edges.multiplicities()[1].max(initial=1) == 1

    def test_rectangular_undirected_rejected(self, rect_model):
        """Test that undirected sampling needs a square model."""
        with pytest.raises(NotSquareError):
            sample_graph(rect_model, GraphOptions(directed=False))
        with pytest.raises(NotSquareError):
            sample_graph(rect_model, GraphOptions(allow_self_loops=False))

    def test_explicit_rng(self, small_model):
        """Test that a passed generator overrides the options seed."""
        first = sample_graph(small_model, GraphOptions(seed=0), rng=make_rng(99))
        second = sample_graph(small_model, GraphOptions(seed=1), rng=make_rng(99))

        np.testing.assert_array_equal(first.sources, second.sources)


@pytest.mark.statistical
class TestDistribution:
    """Monte Carlo checks against independent Poisson cells."""

    REPS = 3000

    def test_directed_matches_dense_poisson(self, small_model):
        """Test every cell's count distribution against Poisson(lambda_ij)."""
        fast = dense_counts(
            sample_graph(small_model, GraphOptions(seed=seed)) for seed in range(self.REPS)
        )
        dense = dense_poisson_samples(small_model, self.REPS, make_rng(2**40))

        pvalues = cellwise_equivalence_pvalues(fast, dense)
        assert pvalues.min() > 1e-4

    def test_mean_matrix(self, small_model):
        """Test that the average adjacency matrix approaches X S X^T."""
        fast = dense_counts(
            sample_graph(small_model, GraphOptions(seed=seed)) for seed in range(self.REPS)
        )
        rates = rate_matrix(small_model)

        np.testing.assert_allclose(
            fast.mean(axis=0), rates, atol=5 * np.sqrt(rates.max() / self.REPS)
        )

    def test_loop_free_matches_off_diagonal(self, small_model):
        """Test loop-free cells against Poisson(lambda_ij) with a zero diagonal."""
        options = [GraphOptions(allow_self_loops=False, seed=seed) for seed in range(self.REPS)]
        fast = dense_counts(sample_graph(small_model, o) for o in options)

        dense = dense_poisson_samples(small_model, self.REPS, make_rng(2**41))
        diagonal = np.arange(small_model.n)
        dense[:, diagonal, diagonal] = 0

        assert cellwise_equivalence_pvalues(fast, dense).min() > 1e-4
        rate = loopless_rate(small_model)
        assert fast.sum(axis=(1, 2)).mean() == pytest.approx(
            rate, abs=4 * np.sqrt(rate / self.REPS)
        )

    def test_undirected_pair_means(self):
        """Test E(count of {i, j}) = lambda_ij for i < j and lambda_ii / 2 on loops."""
        X = [[1.0, 0.0], [0.4, 0.6], [0.0, 1.0]]
        model = validate(X, [[0.9, 0.3], [0.3, 0.5]])
        fast = dense_counts(
            sample_graph(model, GraphOptions(directed=False, seed=seed))
            for seed in range(self.REPS)
        )
        rates = rate_matrix(model)
        expected = np.triu(rates, k=1) + np.diag(np.diag(rates) / 2)

        np.testing.assert_allclose(
            fast.mean(axis=0), expected, atol=5 * np.sqrt(rates.max() / self.REPS)
        )
