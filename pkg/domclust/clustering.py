"""Partitions of items into ranked clusters, and their file codecs."""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import torch
from torch import Tensor

from domclust.utils.errors import ClusteringFormatError, InvariantViolation

SOURCES = ("ds", "kmeans", "external")


@dataclass(frozen=True)
class Cluster:
    """One cluster of a partition.

    Attributes:
        members: Original item indices, ascending.
        weights: Weight of every member, aligned with ``members``, summing to 1.
        rank: Position in the extraction order, starting at 0.
        converged: Whether the solver that produced the cluster converged.
        iterations: Number of solver iterations spent on the cluster.
    """

    members: Tuple[int, ...]
    weights: Tuple[float, ...]
    rank: int
    converged: bool = True
    iterations: int = 0

    @classmethod
    def uniform(cls, members: Sequence[int], rank: int, **kwargs) -> "Cluster":
        """Create a cluster whose members all carry the same weight.

        Args:
            members: Original item indices.
            rank: Extraction rank.
            **kwargs: Forwarded to the constructor.

        Returns:
            The cluster.
        """
        members = tuple(sorted(members))
        weights = (1.0 / len(members),) * len(members) if members else ()
        return cls(members=members, weights=weights, rank=rank, **kwargs)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Clustering:
    """Ordered partition of ``{0, ..., n_items - 1}`` into non-empty clusters.

    Attributes:
        clusters: Clusters in extraction order.
        n_items: Number of partitioned items.
        source: Producer of the partition: ``"ds"`` (dominant sets, with
            characteristic-vector weights), ``"kmeans"`` or ``"external"``.
    """

    clusters: Tuple[Cluster, ...]
    n_items: int
    source: str = "ds"

    def __post_init__(self):
        """Check the partition invariants.

        Raises:
            InvariantViolation: if clusters overlap, miss items, are empty, are
                ranked out of order, or carry misaligned weights
        """
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if self.source not in SOURCES:
            raise InvariantViolation(f"Unknown clustering source {self.source!r}.")

        seen = set()
        for position, cluster in enumerate(self.clusters):
            if cluster.rank != position:
                raise InvariantViolation(
                    f"Cluster at position {position} has rank {cluster.rank}."
                )
            if not cluster.members:
                raise InvariantViolation(f"Cluster {position} is empty.")
            if len(cluster.weights) != len(cluster.members):
                raise InvariantViolation(
                    f"Cluster {position} has {len(cluster.weights)} weights "
                    f"for {len(cluster.members)} members."
                )
            overlap = seen.intersection(cluster.members)
            if overlap:
                raise InvariantViolation(
                    f"Item {min(overlap)} appears in more than one cluster."
                )
            seen.update(cluster.members)

        if seen != set(range(self.n_items)):
            missing = sorted(set(range(self.n_items)) - seen)
            extra = sorted(seen - set(range(self.n_items)))
            raise InvariantViolation(
                f"Clusters do not partition {self.n_items} items "
                f"(missing {missing[:5]}, out of range {extra[:5]})."
            )

    @property
    def n_clusters(self) -> int:
        """Number of clusters."""
        return len(self.clusters)

    @property
    def has_weights(self) -> bool:
        """Whether the weights are characteristic-vector weights."""
        return self.source == "ds"

    def assignments(self) -> Tensor:
        """Cluster rank of every item.

        Returns:
            Long tensor of shape ``[n_items]``.
        """
        ranks = torch.empty(self.n_items, dtype=torch.long)
        for cluster in self.clusters:
            ranks[list(cluster.members)] = cluster.rank
        return ranks

    def to_json(self, ids: Sequence[str], params: Dict[str, Any]) -> Dict[str, Any]:
        """Serialize with item ids.

        Members are listed by descending weight, ties by id. Weights are only
        written for dominant-set clusterings.

        Args:
            ids: Id of every item.
            params: Parameters that produced the clustering.

        Returns:
            JSON-compatible document.
        """
        clusters = []
        for cluster in self.clusters:
            ordered = sorted(
                ((ids[m], w) for m, w in zip(cluster.members, cluster.weights)),
                key=lambda iw: (-iw[1], iw[0]),
            )
            entry = {"rank": cluster.rank, "members": [i for i, _ in ordered]}
            if self.has_weights:
                entry["weights"] = {i: w for i, w in ordered}
            entry["converged"] = cluster.converged
            entry["iterations"] = cluster.iterations
            clusters.append(entry)
        return {"params": dict(params), "source": self.source, "clusters": clusters}

    @classmethod
    def from_json(cls, document: Dict[str, Any], ids: Sequence[str]) -> "Clustering":
        """Parse a clustering document against the ids of an embedding set.

        Args:
            document: Parsed JSON, as written by ``to_json``.
            ids: Item ids in row order. Every id must appear in exactly one
                cluster.

        Returns:
            The clustering, in the item order of ``ids``.

        Raises:
            ClusteringFormatError: if the document is malformed or does not
                cover exactly the given ids
        """
        try:
            entries = sorted(document["clusters"], key=lambda entry: entry["rank"])
            memberships = [list(entry["members"]) for entry in entries]
        except (KeyError, TypeError) as e:
            raise ClusteringFormatError(f"Malformed clustering document: {e!r}") from e

        has_weights = all("weights" in entry for entry in entries)
        source = document.get("source", "ds" if has_weights else "external")
        if source not in SOURCES:
            raise ClusteringFormatError(f"Unknown clustering source {source!r}.")
        if source == "ds" and not has_weights:
            raise ClusteringFormatError("Dominant-set clustering without weights.")

        rows = _rows_of(memberships, ids)
        clusters = []
        for rank, (entry, members) in enumerate(zip(entries, rows)):
            if source == "ds":
                try:
                    weights = {
                        row: float(entry["weights"][item_id])
                        for row, item_id in zip(members, entry["members"])
                    }
                except (KeyError, TypeError, ValueError) as e:
                    raise ClusteringFormatError(
                        f"Cluster {rank} has invalid weights: {e!r}"
                    ) from e
                ordered = sorted(members)
                clusters.append(
                    Cluster(
                        members=tuple(ordered),
                        weights=tuple(weights[m] for m in ordered),
                        rank=rank,
                        converged=bool(entry.get("converged", True)),
                        iterations=int(entry.get("iterations", 0)),
                    )
                )
            else:
                clusters.append(
                    Cluster.uniform(
                        members,
                        rank,
                        converged=bool(entry.get("converged", True)),
                        iterations=int(entry.get("iterations", 0)),
                    )
                )
        return cls(clusters=tuple(clusters), n_items=len(ids), source=source)

    @classmethod
    def from_assignments(
        cls, item_ids: Sequence[str], cluster_ids: Sequence[str], ids: Sequence[str]
    ) -> "Clustering":
        """Build a clustering from an external ``id,cluster_id`` listing.

        Clusters are ranked by the first appearance of their cluster id.

        Args:
            item_ids: Item id of every listing row.
            cluster_ids: Cluster id of every listing row.
            ids: Item ids of the embedding set in row order.

        Returns:
            Clustering with source ``"external"`` and uniform weights.

        Raises:
            ClusteringFormatError: if the listing does not cover exactly ``ids``
        """
        groups: Dict[str, List[str]] = {}
        for item_id, cluster_id in zip(item_ids, cluster_ids):
            groups.setdefault(cluster_id, []).append(item_id)

        rows = _rows_of(list(groups.values()), ids)
        clusters = tuple(
            Cluster.uniform(members, rank) for rank, members in enumerate(rows)
        )
        return cls(clusters=clusters, n_items=len(ids), source="external")


def _rows_of(memberships: List[List[str]], ids: Sequence[str]) -> List[List[int]]:
    """Translate member ids into rows, checking that ``ids`` is covered exactly.

    Args:
        memberships: Member ids of every cluster.
        ids: Reference ids in row order.

    Returns:
        Member rows of every cluster.

    Raises:
        ClusteringFormatError: on unknown, repeated, or missing ids, or empty
            clusters
    """
    row_of = {item_id: row for row, item_id in enumerate(ids)}
    assigned: Dict[str, int] = {}
    rows = []
    for position, members in enumerate(memberships):
        if not members:
            raise ClusteringFormatError(f"Cluster {position} has no members.")
        cluster_rows = []
        for item_id in members:
            if item_id not in row_of:
                raise ClusteringFormatError(
                    f"Id {item_id!r} is clustered but absent from the embeddings."
                )
            if item_id in assigned:
                raise ClusteringFormatError(
                    f"Id {item_id!r} appears in more than one cluster."
                )
            assigned[item_id] = position
            cluster_rows.append(row_of[item_id])
        rows.append(cluster_rows)

    orphan: Optional[str] = next((i for i in ids if i not in assigned), None)
    if orphan is not None:
        raise ClusteringFormatError(
            f"Id {orphan!r} is in the embeddings but not in any cluster."
        )
    return rows
