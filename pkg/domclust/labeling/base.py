"""One-to-one mappings from clusters to ground-truth labels."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from torch import Tensor

from domclust.clustering import Clustering
from domclust.utils.contingency import contingency_table, encode
from domclust.utils.errors import InvariantViolation, LabelingError

UNASSIGNED = None
METHODS = ("max", "hungarian")


@dataclass(frozen=True)
class LabelAssignment:
    """Label of every cluster, ``UNASSIGNED`` for clusters without one.

    Attributes:
        mapping: Maps each cluster rank to a label or ``UNASSIGNED``.
        method: Labeling rule that produced the mapping.
    """

    mapping: Dict[int, Optional[str]]
    method: str

    def __post_init__(self):
        """Check that no label is used twice.

        Raises:
            InvariantViolation: if a label is assigned to several clusters
        """
        used = [label for label in self.mapping.values() if label is not UNASSIGNED]
        if len(used) != len(set(used)):
            duplicate = next(label for label in used if used.count(label) > 1)
            raise InvariantViolation(
                f"Label {duplicate!r} is assigned to more than one cluster."
            )

    def to_json(self) -> Dict:
        """JSON document ``{"method": ..., "mapping": {"<rank>": label or null}}``.

        Returns:
            JSON-compatible document.
        """
        mapping = {str(rank): self.mapping[rank] for rank in sorted(self.mapping)}
        return {"method": self.method, "mapping": mapping}


def check_truth(clustering: Clustering, truth: Sequence[str]) -> None:
    """Check that every item has a ground-truth label.

    Args:
        clustering: Partition of the items.
        truth: Label of every item.

    Raises:
        LabelingError: if labels are missing
    """
    if len(truth) != clustering.n_items:
        raise LabelingError(
            f"Got {len(truth)} ground-truth labels for {clustering.n_items} items."
        )
    for item, label in enumerate(truth):
        if label is None or label == "":
            raise LabelingError(f"Item {item} has no ground-truth label.")


def count_matrix(
    clustering: Clustering, truth: Sequence[str]
) -> Tuple[List[str], Tensor]:
    """Count items per (cluster rank, label).

    Args:
        clustering: Partition of the items.
        truth: Label of every item.

    Returns:
        Labels in sorted order, and counts ``c[i, j]`` of items with label ``j``
        in the cluster of rank ``i``.
    """
    labels, label_index = encode(truth)
    counts = contingency_table(
        clustering.assignments(),
        label_index,
        num_rows=clustering.n_clusters,
        num_cols=len(labels),
    )
    return labels, counts


class LabelingRule(ABC):
    """Base class of the cluster labeling rules.

    Instances are callable as ``rule(clustering, truth)`` and return a
    ``LabelAssignment``.
    """

    method: str

    def __call__(self, clustering: Clustering, truth: Sequence[str]) -> LabelAssignment:
        """Label the clusters.

        Args:
            clustering: Partition of the items.
            truth: Ground-truth label of every item.

        Returns:
            Mapping of every cluster rank to a label or ``UNASSIGNED``.
        """
        check_truth(clustering, truth)
        mapping = self._label(clustering, list(truth))
        return LabelAssignment(mapping=mapping, method=self.method)

    @abstractmethod
    def _label(
        self, clustering: Clustering, truth: List[str]
    ) -> Dict[int, Optional[str]]:
        """Compute the mapping on validated input.

        Args:
            clustering: Partition of the items.
            truth: Ground-truth label of every item.

        Returns: # noqa: DAR202
            Label or ``UNASSIGNED`` for every cluster rank.

        Raises:
            NotImplementedError: Must be implemented by child classes
        """
        raise NotImplementedError


def get_labeling(name: str) -> LabelingRule:
    """Look up a labeling rule by name.

    Args:
        name: ``"max"`` or ``"hungarian"``.

    Returns:
        The labeling rule.

    Raises:
        LabelingError: for unknown names
    """
    from domclust.labeling.hungarian import label_hungarian
    from domclust.labeling.max_rule import label_max

    rules = {"max": label_max, "hungarian": label_hungarian}
    try:
        return rules[name]
    except KeyError:
        raise LabelingError(
            f"Unknown labeling {name!r}. Supported: {', '.join(METHODS)}."
        ) from None
