"""Spherical k-means with cosine similarity."""
import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import torch
from torch import Generator, Tensor
from torch.nn.functional import normalize

from domclust.clustering import Cluster, Clustering
from domclust.context import CTX
from domclust.embeddings import EmbeddingSet
from domclust.utils.errors import DomclustInputError
from domclust.utils.hooks import no_op

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KMeansConfig:
    """Parameters of the k-means baseline.

    Attributes:
        k: Number of clusters.
        max_iterations: Iteration cap of every restart. Default: ``300``.
        n_restarts: Number of independently seeded runs. Default: ``10``.
        seed: Restart ``r`` draws from a generator seeded ``seed + r``.
            Default: ``0``.
    """

    k: int
    max_iterations: int = 300
    n_restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        """Validate the parameters.

        Raises:
            DomclustInputError: if a parameter is out of range
        """
        for name in ("k", "max_iterations", "n_restarts"):
            if getattr(self, name) < 1:
                raise DomclustInputError(
                    f"{name} must be positive, got {getattr(self, name)}."
                )


def _seed_centroids(points: Tensor, k: int, generator: Generator) -> Tensor:
    """k-means++ seeding with squared cosine distances.

    Args:
        points: Unit vectors of shape ``[n, m]``.
        k: Number of centroids.
        generator: Random number generator of the restart.

    Returns:
        Centroids of shape ``[k, m]``.
    """
    n = points.shape[0]
    chosen = [int(torch.randint(n, (1,), generator=generator))]
    closest = (1.0 - points @ points[chosen[0]]).clamp(min=0.0)
    for _ in range(1, k):
        weights = closest ** 2
        weights[chosen] = 0.0
        if weights.sum() > 0:
            nxt = int(torch.multinomial(weights, 1, generator=generator))
        else:
            taken = set(chosen)
            nxt = next(i for i in range(n) if i not in taken)
        chosen.append(nxt)
        distance = (1.0 - points @ points[nxt]).clamp(min=0.0)
        closest = torch.minimum(closest, distance)
    return points[chosen].clone()


def _fill_empty(labels: Tensor, similarity: Tensor, k: int) -> Tensor:
    """Move the point farthest from its centroid into every empty cluster.

    Only points of clusters with at least two members are moved.

    Args:
        labels: Cluster of every point.
        similarity: Cosine similarity of every point to every centroid.
        k: Number of clusters.

    Returns:
        Labels without empty clusters.
    """
    labels = labels.clone()
    sizes = torch.bincount(labels, minlength=k)
    own = similarity.gather(1, labels.unsqueeze(1)).squeeze(1)
    for empty in (sizes == 0).nonzero().flatten().tolist():
        movable = sizes[labels] >= 2
        candidates = torch.where(movable, own, torch.full_like(own, float("inf")))
        point = int(torch.argmin(candidates))
        sizes[labels[point]] -= 1
        labels[point] = empty
        sizes[empty] = 1
    return labels


def _update_centroids(points: Tensor, labels: Tensor, previous: Tensor) -> Tensor:
    sums = torch.zeros_like(previous).index_add_(0, labels, points)
    norms = sums.norm(dim=1, keepdim=True)
    return torch.where(norms > 0, sums / norms.clamp(min=1e-300), previous)


def _single_run(
    points: Tensor,
    config: KMeansConfig,
    restart: int,
    iteration_hook: Callable[[int, int, float], None],
) -> Tuple[Tensor, float, bool, int]:
    generator = torch.Generator().manual_seed(config.seed + restart)
    centroids = _seed_centroids(points, config.k, generator)

    labels, objective, converged = None, float("-inf"), False
    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        similarity = points @ centroids.T
        best, assigned = similarity.max(dim=1)
        objective = best.sum().item()
        iteration_hook(restart, iteration, objective)

        assigned = _fill_empty(assigned, similarity, config.k)
        if labels is not None and torch.equal(assigned, labels):
            converged = True
            break
        labels = assigned
        centroids = _update_centroids(points, labels, centroids)

    return labels, objective, converged, iteration


def kmeans_cosine(
    embeddings: EmbeddingSet,
    config: KMeansConfig,
    iteration_hook: Callable[[int, int, float], None] = no_op,
) -> Clustering:
    """Cluster unit-normalized embeddings by spherical k-means.

    Maximizes the summed cosine similarity of every point to its centroid. The
    best of ``config.n_restarts`` runs is kept, ties going to the earlier run.

    Args:
        embeddings: Embedding set with at least ``config.k`` items.
        config: k-means parameters.
        iteration_hook: Called as ``iteration_hook(restart, iteration,
            objective)`` after every assignment step. Default: ``no_op``.

    Returns:
        Clustering with exactly ``k`` clusters, ranked by descending size (ties
        by smallest member), with uniform weights.

    Raises:
        DomclustInputError: if ``k`` exceeds the number of items
    """
    if config.k > embeddings.n:
        raise DomclustInputError(
            f"k={config.k} exceeds the number of items ({embeddings.n})."
        )
    points = normalize(embeddings.vectors, dim=1)

    best = None
    for restart in range(config.n_restarts):
        run = _single_run(points, config, restart, iteration_hook)
        if CTX.get_debug():
            logger.debug(
                f"k-means restart {restart}: objective {run[1]:.6f} after "
                f"{run[3]} iterations, converged={run[2]}"
            )
        if best is None or run[1] > best[1]:
            best = run

    labels, _, converged, iterations = best
    groups = [(labels == c).nonzero().flatten().tolist() for c in range(config.k)]
    groups.sort(key=lambda members: (-len(members), members[0]))
    clusters = tuple(
        Cluster.uniform(members, rank, converged=converged, iterations=iterations)
        for rank, members in enumerate(groups)
    )
    return Clustering(clusters=clusters, n_items=embeddings.n, source="kmeans")
