"""Locally scaled cosine affinity graphs."""
import csv
import logging
from dataclasses import dataclass
from typing import IO, List, Union

import torch
from einops import rearrange
from torch import Tensor

from domclust.context import CTX
from domclust.embeddings import DTYPE, EmbeddingSet
from domclust.utils.errors import AffinityError
from domclust.utils.subsampling import submatrix

logger = logging.getLogger(__name__)

DEFAULT_KNN = 7
SIGMA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric, non-negative similarity matrix with zero diagonal.

    Construct from untrusted input with ``AffinityMatrix.from_values``, which
    checks the invariants. ``build_affinity`` and ``submatrix`` produce valid
    matrices by construction.

    Attributes:
        values: Matrix of shape ``[n, n]`` in ``torch.float64``.
    """

    values: Tensor

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.values.shape[0]

    @classmethod
    def from_values(cls, values: Union[Tensor, List[List[float]]]) -> "AffinityMatrix":
        """Validate a user-supplied matrix.

        Args:
            values: Square matrix.

        Returns:
            The validated affinity matrix.

        Raises:
            AffinityError: if the matrix is not square, not finite, has negative
                entries, is not exactly symmetric, or has a non-zero diagonal
        """
        values = torch.as_tensor(values, dtype=DTYPE)
        if values.dim() != 2 or values.shape[0] != values.shape[1]:
            raise AffinityError(
                f"Affinity matrix must be square, got shape {tuple(values.shape)}."
            )
        if values.shape[0] < 1:
            raise AffinityError("Affinity matrix must have at least one node.")
        if not torch.isfinite(values).all():
            raise AffinityError("Affinity matrix contains non-finite entries.")
        if (values < 0).any():
            raise AffinityError("Affinity matrix contains negative entries.")
        if not torch.equal(values, values.T):
            raise AffinityError("Affinity matrix is not symmetric.")
        if (torch.diagonal(values) != 0).any():
            raise AffinityError("Affinity matrix has a non-zero diagonal.")
        return cls(values)

    def submatrix(self, indices: Union[Tensor, List[int]]) -> "AffinityMatrix":
        """Restrict the graph to a subset of nodes.

        Args:
            indices: Nodes to keep. Node ``r`` of the result is ``indices[r]``.

        Returns:
            Affinity matrix of the induced subgraph.
        """
        return AffinityMatrix(submatrix(self.values, indices))


def _unit_check(u: Tensor, v: Tensor) -> None:
    if u.shape != v.shape or u.dim() != 1:
        raise AffinityError(
            f"Cannot compare vectors of shapes {tuple(u.shape)} and {tuple(v.shape)}."
        )
    if u.norm() == 0 or v.norm() == 0:
        raise AffinityError("Cosine distance is undefined for zero-norm vectors.")


def cosine_distance(u: Tensor, v: Tensor) -> float:
    """Cosine distance ``1 - <u, v> / (|u| |v|)``, clamped to ``[0, 2]``.

    Args:
        u: First vector.
        v: Second vector.

    Returns:
        The cosine distance.

    Raises:
        AffinityError: for zero-norm vectors or mismatching dimensions
    """
    u = torch.as_tensor(u, dtype=DTYPE)
    v = torch.as_tensor(v, dtype=DTYPE)
    _unit_check(u, v)
    cosine = torch.dot(u, v) / torch.sqrt(torch.dot(u, u) * torch.dot(v, v))
    return float((1.0 - cosine).clamp(0.0, 2.0))


def cosine_distances(vectors: Tensor) -> Tensor:
    """All pairwise cosine distances between the rows of ``vectors``.

    Each pair is evaluated once in the upper triangle and mirrored, so the result
    is exactly symmetric with a zero diagonal.

    Args:
        vectors: Matrix of shape ``[n, m]`` with non-zero rows.

    Returns:
        Distance matrix of shape ``[n, n]`` with entries in ``[0, 2]``.
    """
    gram = torch.einsum("id,jd->ij", vectors, vectors)
    squared_norms = torch.diagonal(gram)
    norms = torch.sqrt(
        rearrange(squared_norms, "i -> i 1") * rearrange(squared_norms, "j -> 1 j")
    )
    distances = (1.0 - gram / norms).clamp(0.0, 2.0)
    upper = torch.triu(distances, diagonal=1)
    return upper + upper.T


def _scales_from_distances(distances: Tensor, knn: int) -> Tensor:
    n = distances.shape[0]
    if n < 2:
        raise AffinityError(f"Local scaling needs at least 2 items, got {n}.")
    if knn < 1:
        raise AffinityError(f"knn must be positive, got {knn}.")

    num_neighbors = min(knn, n - 1)
    others = distances.clone()
    others.fill_diagonal_(float("inf"))
    # stable sort: ties at the neighborhood boundary go to the lower index
    nearest, _ = torch.sort(others, dim=1, stable=True)
    sigma = nearest[:, :num_neighbors].mean(dim=1)
    return sigma.clamp(min=SIGMA_FLOOR)


def local_scales(embeddings: EmbeddingSet, knn: int = DEFAULT_KNN) -> Tensor:
    """Per-item kernel bandwidths ``σ_i``.

    ``σ_i`` is the mean cosine distance from item ``i`` to its ``knn`` nearest
    other items (all other items if there are fewer), floored at ``SIGMA_FLOOR``.

    Args:
        embeddings: Embedding set with at least two items.
        knn: Neighborhood size. Default: ``DEFAULT_KNN``.

    Returns:
        Scales of shape ``[n]``.

    Raises:
        AffinityError: for fewer than two items or a non-positive ``knn``
    """
    return _scales_from_distances(cosine_distances(embeddings.vectors), knn)


def build_affinity(embeddings: EmbeddingSet, knn: int = DEFAULT_KNN) -> AffinityMatrix:
    """Build ``a_ij = exp(-d(f_i, f_j) / (σ_i σ_j))`` with a zero diagonal.

    Args:
        embeddings: Embedding set with at least two items.
        knn: Neighborhood size of the local scaling. Default: ``DEFAULT_KNN``.

    Returns:
        Affinity matrix of the embedding set.
    """
    distances = cosine_distances(embeddings.vectors)
    sigma = _scales_from_distances(distances, knn)

    scale = rearrange(sigma, "i -> i 1") * rearrange(sigma, "j -> 1 j")
    values = torch.exp(-distances / scale)
    values.fill_diagonal_(0.0)

    CTX.count_affinity_build()
    if CTX.get_debug():
        logger.debug(
            f"Built affinity over {embeddings.n} items, knn={knn}, "
            f"sigma in [{sigma.min().item():.3e}, {sigma.max().item():.3e}]"
        )
    return AffinityMatrix(values)


def dump_affinity(affinity: AffinityMatrix, sink: IO[str]) -> None:
    """Write the full matrix as CSV, row-major, after a ``# n=<n>`` comment line.

    Args:
        affinity: Matrix to write.
        sink: Text stream.
    """
    sink.write(f"# n={affinity.n}\n")
    writer = csv.writer(sink, lineterminator="\n")
    for row in affinity.values.tolist():
        writer.writerow([repr(value) for value in row])
