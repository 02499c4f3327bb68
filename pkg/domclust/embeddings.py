"""Labeled embedding sets: validation, CSV persistence, and synthetic data."""
import csv
import io
import logging
from dataclasses import dataclass, field
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import torch
from torch import Generator, Tensor

from domclust.utils.errors import EmbeddingFormatError
from domclust.utils.subsampling import subsample

logger = logging.getLogger(__name__)

DTYPE = torch.float64


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """``n`` feature vectors of dimension ``m`` with ids and optional labels.

    Attributes:
        ids: Unique item identifiers, in row order.
        labels: Ground-truth label per item, or ``None`` for an unlabeled set.
        vectors: Feature matrix of shape ``[n, m]`` in ``torch.float64``.
    """

    ids: Tuple[str, ...]
    labels: Optional[Tuple[str, ...]]
    vectors: Tensor
    _rows: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        """Validate the set.

        Raises:
            EmbeddingFormatError: if dimensions, ids, labels or norms are invalid
        """
        object.__setattr__(self, "ids", tuple(self.ids))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        vectors = torch.as_tensor(self.vectors, dtype=DTYPE)
        object.__setattr__(self, "vectors", vectors)

        if vectors.dim() != 2 or vectors.shape[1] < 1:
            raise EmbeddingFormatError(
                "Expected vectors of shape [n, m] with m >= 1, "
                f"got {tuple(vectors.shape)}."
            )
        if vectors.shape[0] != len(self.ids):
            raise EmbeddingFormatError(
                f"Got {len(self.ids)} ids for {vectors.shape[0]} vectors."
            )
        if self.labels is not None and len(self.labels) != len(self.ids):
            raise EmbeddingFormatError(
                f"Got {len(self.labels)} labels for {len(self.ids)} items."
            )

        rows = {}
        for row, item_id in enumerate(self.ids):
            if item_id in rows:
                raise EmbeddingFormatError(f"Duplicate id {item_id!r}.")
            rows[item_id] = row
        object.__setattr__(self, "_rows", rows)

        if not torch.isfinite(vectors).all():
            row = int((~torch.isfinite(vectors)).any(dim=1).nonzero()[0])
            raise EmbeddingFormatError(f"Non-finite feature in row {self.ids[row]!r}.")

        zero_norm = (vectors.norm(dim=1) == 0).nonzero().flatten().tolist()
        if zero_norm:
            raise EmbeddingFormatError(
                f"Vector of {self.ids[zero_norm[0]]!r} has zero norm, "
                "cosine distance is undefined."
            )

    @property
    def n(self) -> int:
        """Number of items."""
        return len(self.ids)

    @property
    def dim(self) -> int:
        """Feature dimension ``m``."""
        return self.vectors.shape[1]

    @property
    def is_labeled(self) -> bool:
        """Whether every item carries a ground-truth label."""
        return self.labels is not None

    def index_of(self, item_id: str) -> int:
        """Look up the row of an item.

        Args:
            item_id: Identifier of the item.

        Returns:
            Row index of the item.

        Raises:
            KeyError: if the id is not part of the set
        """
        return self._rows[item_id]

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._rows

    def subset(self, indices: Sequence[int]) -> "EmbeddingSet":
        """Select items, preserving the order of ``indices``.

        Args:
            indices: Rows to keep.

        Returns:
            New embedding set with the selected items.
        """
        indices = list(indices)
        labels = None if self.labels is None else [self.labels[i] for i in indices]
        return EmbeddingSet(
            ids=[self.ids[i] for i in indices],
            labels=labels,
            vectors=subsample(self.vectors, dim=0, subsampling=indices),
        )


def load_embeddings(
    source: Union[IO[bytes], IO[str], str], format: str = "csv"
) -> EmbeddingSet:
    """Read an embedding set.

    The CSV contract is a header ``id,label,f0,...,f{m-1}`` followed by one row
    per item. The ``label`` column is either filled for every row or empty for
    every row.

    Args:
        source: Binary or text stream, or a path.
        format: Input format. Only ``"csv"`` is supported. Default: ``"csv"``.

    Returns:
        Validated embedding set in file row order.

    Raises:
        EmbeddingFormatError: if the input violates the CSV contract
    """
    if format != "csv":
        raise EmbeddingFormatError(f"Unsupported embedding format: {format!r}.")

    if isinstance(source, str):
        with open(source, "rb") as stream:
            return load_embeddings(stream, format=format)

    text = source.read()
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8-sig")
        except UnicodeDecodeError as e:
            raise EmbeddingFormatError(f"Embedding file is not UTF-8: {e}") from e

    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise EmbeddingFormatError("Embedding file is empty.")

    header, body = rows[0], rows[1:]
    _check_header(header)
    if not body:
        raise EmbeddingFormatError("Embedding file has a header but no items.")

    ids, labels, vectors = _parse_rows(body, dim=len(header) - 2)
    logger.debug(f"Loaded {len(ids)} embeddings of dimension {len(header) - 2}.")
    return EmbeddingSet(ids=ids, labels=labels, vectors=vectors)


def _check_header(header: List[str]) -> None:
    """Validate the CSV header.

    Args:
        header: First CSV row.

    Raises:
        EmbeddingFormatError: if the header does not follow the contract
    """
    if len(header) < 3 or header[0].strip() != "id" or header[1].strip() != "label":
        raise EmbeddingFormatError(
            f"Expected header 'id,label,f0,...', got {','.join(header)!r}."
        )


def _parse_rows(
    body: List[List[str]], dim: int
) -> Tuple[List[str], Optional[List[str]], Tensor]:
    """Parse CSV item rows.

    Args:
        body: Rows after the header.
        dim: Feature dimension announced by the header.

    Returns:
        Ids, labels (``None`` if all are empty), and the feature matrix.

    Raises:
        EmbeddingFormatError: on dimension mismatch, bad numbers, mixed labels
    """
    ids, labels, features = [], [], []
    for row in body:
        item_id = row[0].strip()
        if len(row) != dim + 2:
            raise EmbeddingFormatError(
                f"Row {item_id!r} has {len(row) - 2} features, expected {dim}."
            )
        try:
            features.append([float(value) for value in row[2:]])
        except ValueError as e:
            raise EmbeddingFormatError(
                f"Row {item_id!r} has a non-numeric feature: {e}"
            ) from e
        ids.append(item_id)
        labels.append(row[1].strip())

    has_label = [label != "" for label in labels]
    if any(has_label) and not all(has_label):
        unlabeled = ids[has_label.index(False)]
        raise EmbeddingFormatError(
            f"Mixed labeling: row {unlabeled!r} has no label while others do."
        )

    vectors = torch.tensor(features, dtype=DTYPE)
    return ids, (labels if all(has_label) else None), vectors


def save_embeddings(embeddings: EmbeddingSet, sink: Union[IO[str], str]) -> None:
    """Write an embedding set in the CSV contract read by ``load_embeddings``.

    Floats are written in their shortest round-trip representation.

    Args:
        embeddings: Set to write.
        sink: Text stream or path.
    """
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8", newline="") as stream:
            save_embeddings(embeddings, stream)
        return

    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["id", "label"] + [f"f{j}" for j in range(embeddings.dim)])
    labels = embeddings.labels or [""] * embeddings.n
    for item_id, label, vector in zip(embeddings.ids, labels, embeddings.vectors):
        writer.writerow([item_id, label] + [repr(v) for v in vector.tolist()])


def random_rotation(dim: int, generator: Generator) -> Tensor:
    """Draw a random orthogonal matrix.

    QR decomposition of a standard Gaussian matrix, with the signs of ``R``'s
    diagonal moved into ``Q`` so that the distribution is uniform.

    Args:
        dim: Matrix size.
        generator: Seeded random number generator.

    Returns:
        Orthogonal matrix of shape ``[dim, dim]``.
    """
    gaussian = torch.randn(dim, dim, generator=generator, dtype=DTYPE)
    Q, R = torch.linalg.qr(gaussian)
    signs = torch.sign(torch.diagonal(R))
    signs[signs == 0] = 1.0
    return Q * signs


def synth_embeddings(
    n_clusters: int,
    points_per_cluster: int,
    dim: int,
    noise_scale: float,
    seed: int,
    rotate: bool = False,
) -> EmbeddingSet:
    """Generate a labeled set of unit vectors around orthogonal centroids.

    Centroid ``c`` is the ``c``-th canonical basis vector, optionally rotated by a
    seeded random orthogonal matrix. Every point is its centroid plus isotropic
    Gaussian noise of standard deviation ``noise_scale``, renormalized to unit
    length. Randomness comes from torch's CPU generator (Mersenne Twister,
    mt19937) seeded with ``seed``.

    Args:
        n_clusters: Number of clusters (speakers).
        points_per_cluster: Points (utterances) per cluster.
        dim: Feature dimension. Must be at least ``n_clusters``.
        noise_scale: Standard deviation of the additive noise.
        seed: Seed of the random number generator.
        rotate: Apply a random rotation to the centroids. Default: ``False``.

    Returns:
        Labeled embedding set, ordered cluster by cluster.

    Raises:
        EmbeddingFormatError: if the parameters are out of range
    """
    if n_clusters < 1 or points_per_cluster < 1 or dim < 1:
        raise EmbeddingFormatError(
            "n_clusters, points_per_cluster and dim must be positive."
        )
    if dim < n_clusters:
        raise EmbeddingFormatError(
            f"Cannot place {n_clusters} orthogonal centroids in dimension {dim}."
        )
    if noise_scale < 0:
        raise EmbeddingFormatError(f"noise_scale must be >= 0, got {noise_scale}.")

    generator = torch.Generator().manual_seed(seed)
    centroids = torch.eye(dim, dtype=DTYPE)[:n_clusters]
    if rotate:
        centroids = centroids @ random_rotation(dim, generator)

    points = centroids.repeat_interleave(points_per_cluster, dim=0)
    if noise_scale > 0:
        noise = torch.randn(points.shape, generator=generator, dtype=DTYPE)
        points = points + noise_scale * noise
    points = points / points.norm(dim=1, keepdim=True)

    ids, labels = _synthetic_names(n_clusters, points_per_cluster)
    return EmbeddingSet(ids=ids, labels=labels, vectors=points)


def _synthetic_names(
    n_clusters: int, points_per_cluster: int
) -> Tuple[Iterable[str], Iterable[str]]:
    ids, labels = [], []
    for c in range(n_clusters):
        for p in range(points_per_cluster):
            ids.append(f"s{c:03d}u{p:03d}")
            labels.append(f"spk{c:03d}")
    return ids, labels
