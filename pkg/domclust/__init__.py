"""domclust: dominant-set clustering of embeddings."""
from types import TracebackType
from typing import Optional, Type

from domclust.affinity import (
    DEFAULT_KNN,
    AffinityMatrix,
    build_affinity,
    cosine_distance,
    cosine_distances,
    local_scales,
)
from domclust.baselines import (
    KMeansConfig,
    eigengap_estimate,
    kmeans_cosine,
    normalized_laplacian,
)
from domclust.clustering import Cluster, Clustering
from domclust.context import CTX
from domclust.core import (
    CharacteristicVector,
    SolverConfig,
    extract_support,
    jacobi_eigh,
    peel_clusters,
    replicator_dynamics,
)
from domclust.embeddings import (
    EmbeddingSet,
    load_embeddings,
    save_embeddings,
    synth_embeddings,
)
from domclust.labeling import (
    UNASSIGNED,
    LabelAssignment,
    get_labeling,
    label_hungarian,
    label_max,
)
from domclust.metrics import (
    EvaluationReport,
    adjusted_rand_index,
    average_cluster_purity,
    evaluate,
    misclassification_rate,
)
from domclust.sweep import SweepGrid, SweepRow, best_cell, run_sweep


class verbose:
    """Context manager to switch on debug diagnostics of the solvers."""

    def __init__(self, debug: bool = True):
        """Store the requested mode.

        Inside the ``with`` block, the solvers emit per-iteration and per-peel
        records on their ``logging`` loggers at level ``DEBUG``.

        Args:
            debug: Whether to emit debug diagnostics. Default: ``True``.
        """
        self.debug = debug

    def __enter__(self):
        """Activate the mode."""
        self.old_debug = CTX.get_debug()
        CTX.set_debug(self.debug)

    def __exit__(
        self,
        __exc_type: Optional[Type[BaseException]],
        __exc_value: Optional[BaseException],
        __traceback: Optional[TracebackType],
    ):
        """Restore the previous mode."""
        CTX.set_debug(self.old_debug)


__all__ = [
    "AffinityMatrix",
    "CharacteristicVector",
    "Cluster",
    "Clustering",
    "DEFAULT_KNN",
    "EmbeddingSet",
    "EvaluationReport",
    "KMeansConfig",
    "LabelAssignment",
    "SolverConfig",
    "SweepGrid",
    "SweepRow",
    "UNASSIGNED",
    "adjusted_rand_index",
    "average_cluster_purity",
    "best_cell",
    "build_affinity",
    "cosine_distance",
    "cosine_distances",
    "eigengap_estimate",
    "evaluate",
    "extract_support",
    "get_labeling",
    "jacobi_eigh",
    "kmeans_cosine",
    "label_hungarian",
    "label_max",
    "load_embeddings",
    "local_scales",
    "misclassification_rate",
    "normalized_laplacian",
    "peel_clusters",
    "replicator_dynamics",
    "run_sweep",
    "save_embeddings",
    "synth_embeddings",
    "verbose",
]
