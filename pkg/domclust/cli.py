"""Batch command-line front end.

Every subcommand reads its inputs from files, writes one result file (or
standard output), and reports progress on standard error. Exit status is 0 on
success, 1 for input, solver and I/O errors, and 2 for internal errors.
"""
import argparse
import csv
import json
import logging
import sys
from typing import IO, Callable, List, Optional, Sequence

from domclust import verbose
from domclust.affinity import DEFAULT_KNN, build_affinity, dump_affinity
from domclust.baselines.eigengap import eigengap_estimate
from domclust.baselines.kmeans import KMeansConfig, kmeans_cosine
from domclust.clustering import Clustering
from domclust.core.peeling import peel_clusters
from domclust.core.replicator import SolverConfig
from domclust.embeddings import (
    EmbeddingSet,
    load_embeddings,
    save_embeddings,
    synth_embeddings,
)
from domclust.metrics import evaluate
from domclust.sweep import (
    DEFAULT_EPSILONS,
    DEFAULT_THETAS,
    SweepGrid,
    best_cell,
    run_sweep,
    write_sweep_csv,
)
from domclust.utils.errors import (
    ClusteringFormatError,
    DisconnectedGraphError,
    DomclustInputError,
    EigensolverError,
    InvariantViolation,
    LabelingError,
    SolverError,
)
from domclust.utils.io import atomic_write

logger = logging.getLogger("domclust")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INTERNAL = 2
K_SOURCES = ("eigengap", "ds", "truth")
COMPARE_HEADER = ("method", "k_source", "k", "mr", "ari", "acp", "n_clusters")


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message: str):
        """Print usage and exit.

        Args:
            message: Description of the usage error.
        """
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",") if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"not a comma-separated list of numbers: {text!r}"
        ) from None


def _emit(path: Optional[str], write: Callable[[IO[str]], None]) -> None:
    """Write a result atomically to ``path``, or to standard output.

    Args:
        path: Output file, ``None`` for standard output.
        write: Writes the result to a text stream.
    """
    if path is None:
        write(sys.stdout)
        sys.stdout.flush()
    else:
        with atomic_write(path) as stream:
            write(stream)


def _write_json(document) -> Callable[[IO[str]], None]:
    def write(stream: IO[str]) -> None:
        json.dump(document, stream, indent=2)
        stream.write("\n")

    return write


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        theta=args.theta, epsilon=args.epsilon, max_iterations=args.max_iters
    )


def _require_labels(embeddings: EmbeddingSet, what: str) -> Sequence[str]:
    if not embeddings.is_labeled:
        raise LabelingError(f"{what} needs ground-truth labels in the input.")
    return embeddings.labels


def _choose_k(args: argparse.Namespace, embeddings: EmbeddingSet, affinity=None) -> int:
    """Number of clusters for k-means, from ``--k`` or ``--k-from``.

    Args:
        args: Parsed arguments.
        embeddings: Input embeddings.
        affinity: Affinity matrix, built on demand if ``None``.

    Returns:
        The number of clusters.

    Raises:
        DomclustInputError: if neither or both of ``--k`` and ``--k-from`` are set
    """
    if args.k is not None and args.k_from is not None:
        raise DomclustInputError("Use either --k or --k-from, not both.")
    if args.k is not None:
        return args.k
    if args.k_from is None:
        raise DomclustInputError(
            "k is required for --algorithm kmeans (give --k or --k-from)."
        )
    return _k_from(args.k_from, args, embeddings, affinity)


def _k_from(
    source: str, args: argparse.Namespace, embeddings: EmbeddingSet, affinity=None
) -> int:
    if source == "truth":
        return len(set(_require_labels(embeddings, "--k-from truth")))
    if affinity is None:
        affinity = build_affinity(embeddings, knn=args.knn)
    if source == "eigengap":
        return eigengap_estimate(affinity)
    return peel_clusters(affinity, _solver_config(args)).n_clusters


def cmd_synth(args: argparse.Namespace) -> None:
    """Generate a labeled synthetic embedding set.

    Args:
        args: Parsed arguments.
    """
    embeddings = synth_embeddings(
        n_clusters=args.n_clusters,
        points_per_cluster=args.points_per_cluster,
        dim=args.dim,
        noise_scale=args.noise,
        seed=args.seed,
        rotate=args.rotate,
    )
    _emit(args.output, lambda stream: save_embeddings(embeddings, stream))
    logger.info(f"synth: n={embeddings.n} m={embeddings.dim}")


def cmd_cluster(args: argparse.Namespace) -> None:
    """Cluster an embedding set with dominant sets or k-means.

    Args:
        args: Parsed arguments.
    """
    embeddings = load_embeddings(args.input)
    affinity = None
    needs_affinity = args.dump_affinity or args.k_from in ("ds", "eigengap")
    if args.algorithm == "ds" or needs_affinity:
        affinity = build_affinity(embeddings, knn=args.knn)

    if args.algorithm == "ds":
        clustering = peel_clusters(affinity, _solver_config(args))
        params = {
            "algorithm": "ds",
            "theta": args.theta,
            "epsilon": args.epsilon,
            "max_iterations": args.max_iters,
            "knn": args.knn,
        }
    else:
        k = _choose_k(args, embeddings, affinity)
        config = KMeansConfig(
            k=k, max_iterations=args.max_iters, n_restarts=args.restarts, seed=args.seed
        )
        clustering = kmeans_cosine(embeddings, config)
        params = {
            "algorithm": "kmeans",
            "k": k,
            "k_from": args.k_from,
            "max_iterations": args.max_iters,
            "restarts": args.restarts,
            "seed": args.seed,
        }

    if args.dump_affinity:
        with atomic_write(args.dump_affinity) as stream:
            dump_affinity(affinity, stream)
    _emit(args.output, _write_json(clustering.to_json(embeddings.ids, params)))
    iterations = sum(cluster.iterations for cluster in clustering.clusters)
    logger.info(
        f"cluster: n={embeddings.n} m={embeddings.dim} "
        f"n_clusters={clustering.n_clusters} iterations={iterations}"
    )


def _read_clustering(args: argparse.Namespace, embeddings: EmbeddingSet) -> Clustering:
    """Load a clustering JSON or an external ``id,cluster_id`` listing.

    Args:
        args: Parsed arguments.
        embeddings: Embeddings the clustering refers to.

    Returns:
        The clustering aligned with the embeddings.

    Raises:
        ClusteringFormatError: for unreadable files
    """
    if args.clusters is not None:
        with open(args.clusters, encoding="utf-8") as stream:
            try:
                document = json.load(stream)
            except json.JSONDecodeError as e:
                raise ClusteringFormatError(
                    f"{args.clusters}: invalid JSON: {e}"
                ) from e
        return Clustering.from_json(document, embeddings.ids)

    with open(args.assignments, encoding="utf-8-sig", newline="") as stream:
        rows = [row for row in csv.reader(stream) if row]
    if not rows or [field.strip() for field in rows[0]] != ["id", "cluster_id"]:
        raise ClusteringFormatError(
            f"{args.assignments}: expected header 'id,cluster_id'."
        )
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ClusteringFormatError(
                f"{args.assignments}: line {number} has {len(row)} fields, expected 2."
            )
    item_ids = [row[0].strip() for row in rows[1:]]
    cluster_ids = [row[1].strip() for row in rows[1:]]
    return Clustering.from_assignments(item_ids, cluster_ids, embeddings.ids)


def cmd_evaluate(args: argparse.Namespace) -> None:
    """Evaluate a clustering against the labels of its embeddings.

    Args:
        args: Parsed arguments.
    """
    embeddings = load_embeddings(args.input)
    truth = _require_labels(embeddings, "evaluate")
    clustering = _read_clustering(args, embeddings)
    report = evaluate(clustering, truth, labeling=args.labeling)

    if args.csv:
        _emit(args.output, report.write_csv)
    else:
        _emit(args.output, _write_json(report.to_json()))
    logger.info(
        f"evaluate: mr={report.mr:.4f} ari={report.ari:.4f} acp={report.acp:.4f} "
        f"n_clusters={report.n_clusters}"
    )


def cmd_estimate_k(args: argparse.Namespace) -> None:
    """Print the eigengap estimate of the number of clusters.

    Args:
        args: Parsed arguments.
    """
    embeddings = load_embeddings(args.input)
    k = eigengap_estimate(build_affinity(embeddings, knn=args.knn))
    _emit(args.output, lambda stream: stream.write(f"{k}\n"))


def cmd_sweep(args: argparse.Namespace) -> None:
    """Evaluate dominant sets on a grid of thresholds and precisions.

    Args:
        args: Parsed arguments.
    """
    embeddings = load_embeddings(args.input)
    _require_labels(embeddings, "sweep")
    grid = SweepGrid(thetas=args.thetas, epsilons=args.epsilons)
    result = run_sweep(
        embeddings,
        grid,
        knn=args.knn,
        labeling=args.labeling,
        max_iterations=args.max_iters,
        n_workers=args.workers,
    )
    _emit(args.output, lambda stream: write_sweep_csv(result.rows, stream))
    best = best_cell(result.rows)
    logger.info(
        f"sweep: {len(result.rows)} cells, best theta={best.theta} "
        f"epsilon={best.epsilon} mr={best.mr:.4f} ari={best.ari:.4f}"
    )


def cmd_compare(args: argparse.Namespace) -> None:
    """Compare dominant sets with k-means under every k selection strategy.

    Args:
        args: Parsed arguments.
    """
    embeddings = load_embeddings(args.input)
    truth = _require_labels(embeddings, "compare")
    affinity = build_affinity(embeddings, knn=args.knn)

    ds = peel_clusters(affinity, _solver_config(args))
    rows = [("ds", "", ds.n_clusters, evaluate(ds, truth, labeling=args.labeling))]
    for source in K_SOURCES:
        if source == "ds":
            k = ds.n_clusters
        else:
            k = _k_from(source, args, embeddings, affinity)
        config = KMeansConfig(
            k=k, max_iterations=args.max_iters, n_restarts=args.restarts, seed=args.seed
        )
        report = evaluate(kmeans_cosine(embeddings, config), truth, "hungarian")
        rows.append(("kmeans", source, k, report))

    def write(stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(COMPARE_HEADER)
        for method, source, k, report in rows:
            writer.writerow([method, source, k] + list(report.csv_row()))

    _emit(args.output, write)


def _add_solver_flags(parser: argparse.ArgumentParser, thresholds: bool = True):
    if thresholds:
        parser.add_argument(
            "--theta", type=float, default=0.1, help="support threshold (default: 0.1)"
        )
        parser.add_argument(
            "--epsilon",
            type=float,
            default=1e-6,
            help="convergence precision (default: 1e-06)",
        )
    parser.add_argument(
        "--max-iters",
        type=int,
        default=10_000,
        help="iteration cap per cluster or k-means run (default: 10000)",
    )
    parser.add_argument(
        "--knn",
        type=int,
        default=DEFAULT_KNN,
        help=f"neighbors of the local scaling (default: {DEFAULT_KNN})",
    )


def build_parser() -> ArgumentParser:
    """Create the argument parser of all subcommands.

    Returns:
        The parser.
    """
    common = ArgumentParser(add_help=False)
    common.add_argument("--debug", action="store_true", help="print debug diagnostics")
    common.add_argument("--output", help="output file (default: standard output)")

    parser = ArgumentParser(
        prog="domclust", description="Dominant-set clustering of embeddings."
    )
    commands = parser.add_subparsers(
        dest="subcommand", metavar="subcommand", parser_class=ArgumentParser
    )
    commands.required = True

    synth = commands.add_parser(
        "synth", parents=[common], help="generate a labeled synthetic embedding set"
    )
    synth.add_argument("--n-clusters", type=int, required=True)
    synth.add_argument("--points-per-cluster", type=int, required=True)
    synth.add_argument("--dim", type=int, required=True)
    synth.add_argument(
        "--noise", type=float, default=0.0, help="noise scale (default: 0.0)"
    )
    synth.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    synth.add_argument("--rotate", action="store_true", help="rotate the centroids")
    synth.set_defaults(command=cmd_synth)

    cluster = commands.add_parser(
        "cluster", parents=[common], help="cluster an embedding set"
    )
    cluster.add_argument("--input", required=True, help="embedding CSV")
    cluster.add_argument(
        "--algorithm", choices=("ds", "kmeans"), default="ds", help="(default: ds)"
    )
    _add_solver_flags(cluster)
    cluster.add_argument("--k", type=int, help="number of k-means clusters")
    cluster.add_argument(
        "--k-from", choices=K_SOURCES, help="derive the number of k-means clusters"
    )
    cluster.add_argument(
        "--restarts", type=int, default=10, help="k-means restarts (default: 10)"
    )
    cluster.add_argument(
        "--seed", type=int, default=0, help="k-means seed (default: 0)"
    )
    cluster.add_argument("--dump-affinity", help="write the affinity matrix as CSV")
    cluster.set_defaults(command=cmd_cluster)

    evaluate_ = commands.add_parser(
        "evaluate", parents=[common], help="evaluate a clustering against labels"
    )
    evaluate_.add_argument("--input", required=True, help="labeled embedding CSV")
    source = evaluate_.add_mutually_exclusive_group(required=True)
    source.add_argument("--clusters", help="clustering JSON written by 'cluster'")
    source.add_argument("--assignments", help="external 'id,cluster_id' CSV")
    evaluate_.add_argument(
        "--labeling",
        choices=("max", "hungarian"),
        default="hungarian",
        help="(default: hungarian)",
    )
    evaluate_.add_argument("--csv", action="store_true", help="one-line CSV output")
    evaluate_.set_defaults(command=cmd_evaluate)

    estimate = commands.add_parser(
        "estimate-k", parents=[common], help="eigengap estimate of the cluster count"
    )
    estimate.add_argument("--input", required=True, help="embedding CSV")
    estimate.add_argument(
        "--knn",
        type=int,
        default=DEFAULT_KNN,
        help=f"neighbors of the local scaling (default: {DEFAULT_KNN})",
    )
    estimate.set_defaults(command=cmd_estimate_k)

    sweep = commands.add_parser(
        "sweep", parents=[common], help="sensitivity sweep over theta and epsilon"
    )
    sweep.add_argument("--input", required=True, help="labeled embedding CSV")
    sweep.add_argument(
        "--thetas",
        type=_float_list,
        default=list(DEFAULT_THETAS),
        help="comma-separated thresholds (default: 0.0 ... 0.9995, 17 values)",
    )
    sweep.add_argument(
        "--epsilons",
        type=_float_list,
        default=list(DEFAULT_EPSILONS),
        help="comma-separated precisions (default: decades 1e-11 ... 1e-2)",
    )
    _add_solver_flags(sweep, thresholds=False)
    sweep.add_argument(
        "--labeling",
        choices=("max", "hungarian"),
        default="hungarian",
        help="(default: hungarian)",
    )
    sweep.add_argument(
        "--workers", type=int, default=1, help="threads evaluating cells (default: 1)"
    )
    sweep.set_defaults(command=cmd_sweep)

    compare = commands.add_parser(
        "compare", parents=[common], help="dominant sets against k-means"
    )
    compare.add_argument("--input", required=True, help="labeled embedding CSV")
    _add_solver_flags(compare)
    compare.add_argument(
        "--labeling",
        choices=("max", "hungarian"),
        default="hungarian",
        help="labeling of the dominant-set row (default: hungarian)",
    )
    compare.add_argument(
        "--restarts", type=int, default=10, help="k-means restarts (default: 10)"
    )
    compare.add_argument(
        "--seed", type=int, default=0, help="k-means seed (default: 0)"
    )
    compare.set_defaults(command=cmd_compare)

    return parser


def _configure_logging(debug: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if debug else logging.INFO,
        format="%(name)s: %(levelname)s: %(message)s",
    )
    logging.getLogger().setLevel(logging.DEBUG if debug else logging.INFO)
    logging.captureWarnings(True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line interface.

    Args:
        argv: Arguments without the program name. Default: ``sys.argv[1:]``.

    Returns:
        Exit status.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.debug)

    try:
        with verbose(debug=args.debug):
            args.command(args)
    except InvariantViolation as e:
        logger.error(f"{args.subcommand}: internal error [{e.stage}]: {e}")
        return EXIT_INTERNAL
    except (
        DomclustInputError,
        DisconnectedGraphError,
        SolverError,
        EigensolverError,
    ) as e:
        logger.error(f"{args.subcommand}: {e.stage} error: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"{args.subcommand}: io error: {e}")
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
