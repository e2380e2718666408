"""
fastrg - Fast Low-Rank Random Graph Sampler

Command-line entry point:
- sample: sample a graph from X, S (and Y) factor files
- model: sample a named blockmodel (sbm, dcsbm, mmsbm, overlapping, chunglu)
- bench: time edge-list generation over an (n, E(m)) grid, CSV on stdout

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from dotenv import load_dotenv

load_dotenv()

import argparse  # noqa: E402
import logging  # noqa: E402
import os  # noqa: E402
import sys  # noqa: E402
from typing import Optional, Sequence  # noqa: E402

import numpy as np  # noqa: E402

from bench import fit_loglog_slopes, run_bench, write_bench_csv  # noqa: E402
from blockmodels.base import BlockSpec  # noqa: E402
from blockmodels.chunglu import ChungLuSpec  # noqa: E402
from blockmodels.dcsbm import DCSBMSpec  # noqa: E402
from blockmodels.mixed import MixedMembershipSpec, sample_mixed_memberships  # noqa: E402
from blockmodels.overlapping import OverlappingSpec  # noqa: E402
from blockmodels.sbm import SBMSpec, memberships_from_sizes, sample_memberships  # noqa: E402
from edgeio import EDGE_FORMATS, read_factor_matrix, write_edge_list  # noqa: E402
from errors import FastRGError, InvalidArgumentError, UnsupportedMeanFunctionError  # noqa: E402
from model import FactorModel, scale_to_avg_degree, validate  # noqa: E402
from sampler import GraphOptions, membership_rng, sample_graph  # noqa: E402
from utils import parse_float_list, parse_int_list, parse_square_matrix  # noqa: E402

logger = logging.getLogger(__name__)

# Configuration
LOG_LEVEL = os.getenv("FASTRG_LOG_LEVEL", "WARNING").upper()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class CLIParser(argparse.ArgumentParser):
    """ArgumentParser that exits with EXIT_USAGE on bad arguments."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def configure_logging(verbose: bool = False) -> None:
    """Log to stderr so stdout stays clean for CSV."""
    logging.basicConfig(
        level=logging.INFO if verbose else LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


# ============================================
# ARGUMENTS
# ============================================


def _sampling_flags() -> argparse.ArgumentParser:
    flags = CLIParser(add_help=False)
    flags.add_argument("--avg-deg", type=float, help="rescale S to this expected average degree")
    flags.add_argument("--undirected", action="store_true", help="sample with S/2 and drop directions")
    flags.add_argument("--no-self-loops", action="store_true", help="exclude self-loops exactly")
    flags.add_argument("--simple", action="store_true", help="undirected, loop-free, thresholded")
    flags.add_argument("--bernoulli", action="store_true", help="SBM only: use -ln(1-B) as S")
    flags.add_argument("--parallel-blocks", action="store_true", help="one stream per block")
    flags.add_argument("--seed", type=int, required=True, help="64-bit seed")
    flags.add_argument("--out", required=True, help="output edge list path")
    flags.add_argument("--format", choices=EDGE_FORMATS, default="tsv", help="edge list format")
    return flags


def _block_flags() -> argparse.ArgumentParser:
    flags = CLIParser(add_help=False)
    b = flags.add_mutually_exclusive_group(required=True)
    b.add_argument("--b", type=parse_square_matrix, help="row-major K*K block matrix")
    b.add_argument("--b-file", help="block matrix file (CSV or .mtx)")
    return flags


def _label_flags() -> argparse.ArgumentParser:
    flags = CLIParser(add_help=False)
    labels = flags.add_mutually_exclusive_group(required=True)
    labels.add_argument("--block-sizes", type=parse_int_list, help="block sizes, block 0 first")
    labels.add_argument("--memberships", type=parse_int_list, help="block label per node")
    labels.add_argument("--block-probs", type=parse_float_list, help="random labels with these proportions")
    flags.add_argument("--n", type=int, help="node count for random labels")
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = CLIParser(prog="fastrg", description="Sample sparse graphs with low-rank expectation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    sampling = _sampling_flags()
    blocks = _block_flags()
    labels = _label_flags()

    sample = commands.add_parser("sample", parents=[sampling], help="sample from factor files")
    sample.add_argument("--x", required=True, help="X matrix file")
    sample.add_argument("--s", required=True, help="S matrix file")
    sample.add_argument("--y", help="Y matrix file (defaults to X)")

    model = commands.add_parser("model", help="sample a named blockmodel")
    kinds = model.add_subparsers(dest="kind", required=True)
    kinds.add_parser("sbm", parents=[labels, blocks, sampling], help="stochastic blockmodel")
    dcsbm = kinds.add_parser("dcsbm", parents=[labels, blocks, sampling], help="degree-corrected SBM")
    dcsbm.add_argument("--theta", type=parse_float_list, required=True, help="degree parameter per node")
    mmsbm = kinds.add_parser("mmsbm", parents=[blocks, sampling], help="mixed-membership SBM")
    memberships = mmsbm.add_mutually_exclusive_group(required=True)
    memberships.add_argument("--pi", help="membership matrix file")
    memberships.add_argument("--dirichlet", type=parse_float_list, help="random Dirichlet(alpha) rows")
    mmsbm.add_argument("--n", type=int, help="node count for random rows")
    overlapping = kinds.add_parser("overlapping", parents=[blocks, sampling], help="overlapping SBM")
    overlapping.add_argument("--z", required=True, help="binary membership matrix file")
    chunglu = kinds.add_parser("chunglu", parents=[sampling], help="Chung-Lu")
    weights = chunglu.add_mutually_exclusive_group(required=True)
    weights.add_argument("--weights", type=parse_float_list, help="weight per node")
    weights.add_argument("--weights-file", help="single-column weight file")

    bench = commands.add_parser("bench", help="time edge-list generation")
    bench.add_argument("--n-grid", type=parse_int_list, required=True, help="node counts")
    bench.add_argument("--m-grid", type=parse_int_list, required=True, help="expected edge counts")
    bench.add_argument("--reps", type=int, default=3, help="samples per grid point")
    bench.add_argument("--seed", type=int, default=0, help="root seed")
    bench.add_argument("--parallel", action="store_true", help="grid points in worker processes")

    return parser


# ============================================
# COMMANDS
# ============================================


def _graph_options(args: argparse.Namespace) -> GraphOptions:
    if args.simple:
        return GraphOptions.simple(seed=args.seed, parallel_blocks=args.parallel_blocks)
    return GraphOptions(
        directed=not args.undirected,
        allow_self_loops=not args.no_self_loops,
        seed=args.seed,
        parallel_blocks=args.parallel_blocks,
    )


def _sample_and_write(model: FactorModel, args: argparse.Namespace) -> int:
    edges = sample_graph(model, _graph_options(args))
    if len(edges) == 0:
        logger.warning(f"Sampled an empty graph on {model.n} nodes")
    write_edge_list(edges, args.out, args.format)
    logger.info(f"Sampled {len(edges)} edges on {model.n} nodes")
    return EXIT_OK


def _block_matrix(args: argparse.Namespace) -> np.ndarray:
    return args.b if args.b is not None else read_factor_matrix(args.b_file)


def cmd_sample(args: argparse.Namespace) -> int:
    X = read_factor_matrix(args.x)
    S = read_factor_matrix(args.s)
    Y = read_factor_matrix(args.y) if args.y else None

    if args.bernoulli:
        one_hot = np.isin(X, (0.0, 1.0)).all() and (X.sum(axis=1) == 1).all()
        if Y is not None or not one_hot:
            raise UnsupportedMeanFunctionError(
                "--bernoulli needs an SBM: one-hot X and no separate Y"
            )
        spec = SBMSpec(memberships=X.argmax(axis=1), B=S, bernoulli=True)
        return _sample_and_write(spec.to_factor_model(args.avg_deg), args)

    model = validate(X, S, Y)
    if args.avg_deg is not None:
        model = scale_to_avg_degree(model, args.avg_deg)
    return _sample_and_write(model, args)


def _random_n(args: argparse.Namespace) -> int:
    if args.n is None or args.n < 1:
        raise InvalidArgumentError("random memberships need --n >= 1")
    return args.n


def _block_spec(args: argparse.Namespace) -> BlockSpec:
    if args.kind == "chunglu":
        if args.weights is not None:
            weights = np.asarray(args.weights)
        else:
            weights = read_factor_matrix(args.weights_file).ravel()
        return ChungLuSpec(weights=weights, bernoulli=args.bernoulli)

    B = _block_matrix(args)
    if args.kind == "mmsbm":
        if args.pi is not None:
            Pi = read_factor_matrix(args.pi)
        else:
            Pi = sample_mixed_memberships(_random_n(args), args.dirichlet, membership_rng(args.seed))
        return MixedMembershipSpec(Pi=Pi, B=B, bernoulli=args.bernoulli)
    if args.kind == "overlapping":
        return OverlappingSpec(Z=read_factor_matrix(args.z), B=B, bernoulli=args.bernoulli)

    if args.block_sizes is not None:
        memberships = memberships_from_sizes(args.block_sizes)
    elif args.block_probs is not None:
        memberships = sample_memberships(_random_n(args), args.block_probs, membership_rng(args.seed))
    else:
        memberships = np.asarray(args.memberships)

    if args.kind == "dcsbm":
        return DCSBMSpec(
            memberships=memberships,
            theta=np.asarray(args.theta),
            B=B,
            bernoulli=args.bernoulli,
        )
    return SBMSpec(memberships=memberships, B=B, bernoulli=args.bernoulli)


def cmd_model(args: argparse.Namespace) -> int:
    spec = _block_spec(args)
    return _sample_and_write(spec.to_factor_model(args.avg_deg), args)


def cmd_bench(args: argparse.Namespace) -> int:
    records = run_bench(
        args.n_grid,
        args.m_grid,
        reps=args.reps,
        seed=args.seed,
        parallel=args.parallel,
    )
    write_bench_csv(records, sys.stdout)
    sys.stdout.flush()

    if records:
        fit_loglog_slopes(records, by="expected_m")
        fit_loglog_slopes(records, by="n")
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "model": cmd_model,
    "bench": cmd_bench,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE

    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except (FastRGError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"fastrg: error: {e}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(cli_main())
