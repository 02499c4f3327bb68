"""Peel dominant sets off a graph until every node is assigned."""
import logging

import torch

from domclust.affinity import AffinityMatrix
from domclust.clustering import Cluster, Clustering
from domclust.context import CTX
from domclust.core.replicator import SolverConfig, extract_support, replicator_dynamics
from domclust.utils.errors import DisconnectedGraphError, warn_if_not_converged

logger = logging.getLogger(__name__)


def peel_clusters(
    affinity: AffinityMatrix, config: SolverConfig = SolverConfig()
) -> Clustering:
    """Partition a graph into dominant sets by the peeling-off strategy.

    The replicator dynamics runs on the subgraph of unassigned nodes. Its
    thresholded support becomes the next cluster and is removed. A last
    remaining node becomes a singleton; so does every remaining node once the
    subgraph has no edges left.

    Args:
        affinity: Affinity matrix of at least one node.
        config: Solver parameters. Default: ``SolverConfig()``.

    Returns:
        Clustering in extraction order, with member weights renormalized over
        each support.
    """
    remaining = torch.arange(affinity.n)
    clusters = []

    while remaining.numel() > 0:
        rank = len(clusters)
        if remaining.numel() == 1:
            clusters.append(Cluster.uniform(remaining.tolist(), rank))
            break

        try:
            x = replicator_dynamics(affinity.submatrix(remaining), config)
        except DisconnectedGraphError:
            logger.debug(
                f"No edges among the last {remaining.numel()} nodes, "
                "emitting singletons."
            )
            for offset, node in enumerate(remaining.tolist()):
                clusters.append(Cluster.uniform([node], rank + offset))
            break

        warn_if_not_converged(
            x.converged, x.iterations, f"Replicator dynamics for cluster {rank}"
        )

        local = extract_support(x, config.theta)
        weights = x.weights[local]
        weights = weights / weights.sum()
        clusters.append(
            Cluster(
                members=tuple(remaining[local].tolist()),
                weights=tuple(weights.tolist()),
                rank=rank,
                converged=x.converged,
                iterations=x.iterations,
            )
        )

        keep = torch.ones_like(remaining, dtype=torch.bool)
        keep[local] = False
        remaining = remaining[keep]

        if CTX.get_debug():
            logger.debug(
                f"Peeled cluster {rank} of size {local.numel()} after "
                f"{x.iterations} iterations, {remaining.numel()} nodes left"
            )

    return Clustering(clusters=tuple(clusters), n_items=affinity.n, source="ds")
