"""Misclassification rate, average cluster purity and adjusted Rand index.

The misclassification rate and the cluster purity work on exact integer counts.
The adjusted Rand index comes from scikit-learn.
"""
import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Any, Dict, Sequence, Tuple, Union

from sklearn.metrics import adjusted_rand_score

from domclust.clustering import Clustering
from domclust.labeling.base import (
    UNASSIGNED,
    LabelAssignment,
    check_truth,
    count_matrix,
    get_labeling,
)
from domclust.utils.contingency import contingency_table, encode, marginals
from domclust.utils.errors import DomclustInputError, LabelingError

CSV_HEADER = ("mr", "ari", "acp", "n_clusters")


def misclassification_rate(
    clustering: Clustering, truth: Sequence[str], assignment: LabelAssignment
) -> Tuple[float, Dict[str, int]]:
    """Fraction of items whose cluster label differs from their true label.

    Members of ``UNASSIGNED`` clusters are errors of their true speaker.

    Args:
        clustering: Partition of the items.
        truth: Ground-truth label of every item.
        assignment: Label of every cluster.

    Returns:
        The rate, and the number of errors ``e_j`` of every true label, in
        sorted label order.

    Raises:
        LabelingError: if the assignment does not cover every cluster
    """
    check_truth(clustering, truth)
    missing = [c.rank for c in clustering.clusters if c.rank not in assignment.mapping]
    if missing:
        raise LabelingError(f"Assignment has no entry for cluster {missing[0]}.")

    errors = {label: 0 for label in sorted(set(truth))}
    for cluster in clustering.clusters:
        assigned = assignment.mapping[cluster.rank]
        for member in cluster.members:
            if assigned is UNASSIGNED or assigned != truth[member]:
                errors[truth[member]] += 1

    rate = Fraction(sum(errors.values()), clustering.n_items)
    return float(rate), errors


def average_cluster_purity(clustering: Clustering, truth: Sequence[str]) -> float:
    """Size-weighted mean of the cluster purities ``p_i = sum_j n_ij² / n_i²``.

    Args:
        clustering: Partition of the items.
        truth: Ground-truth label of every item.

    Returns:
        ``(1/N) sum_i p_i n_i``, in ``(0, 1]``.
    """
    check_truth(clustering, truth)
    _, counts = count_matrix(clustering, truth)
    total = Fraction(0)
    for row in counts.tolist():
        size = sum(row)
        total += Fraction(sum(n * n for n in row), size)
    return float(total / clustering.n_items)


def adjusted_rand_index(
    clustering: Union[Clustering, Sequence], truth: Sequence[str]
) -> float:
    """Chance-corrected pair-counting agreement of a clustering with the truth.

    Identical trivial partitions (one cluster, or all singletons, on both sides)
    have no chance-corrected agreement and score ``0``.

    Args:
        clustering: Partition, or the cluster id of every item.
        truth: Ground-truth label of every item.

    Returns:
        The adjusted Rand index in ``[-1, 1]``.

    Raises:
        DomclustInputError: if sizes disagree or there are fewer than two items
    """
    if isinstance(clustering, Clustering):
        check_truth(clustering, truth)
        clusters = clustering.assignments()
    else:
        _, clusters = encode(clustering)
    if len(clusters) != len(truth):
        raise DomclustInputError(
            f"Got {len(truth)} labels for {len(clusters)} clustered items."
        )
    n = len(truth)
    if n < 2:
        raise DomclustInputError(f"The adjusted Rand index needs 2 items, got {n}.")

    _, labels = encode(truth)
    row_sums, col_sums = marginals(contingency_table(clusters, labels))
    n_clusters = sum(1 for size in row_sums if size > 0)
    if n_clusters == len(col_sums) and n_clusters in (1, n):
        return 0.0
    return float(adjusted_rand_score(labels.tolist(), clusters.tolist()))


@dataclass(frozen=True)
class EvaluationReport:
    """Metrics of one clustering against the ground truth.

    Attributes:
        mr: Misclassification rate.
        ari: Adjusted Rand index.
        acp: Average cluster purity.
        n_clusters: Number of clusters.
        assignment: Cluster labeling used for the misclassification rate.
        per_speaker_errors: Misclassified items of every true label.
    """

    mr: float
    ari: float
    acp: float
    n_clusters: int
    assignment: LabelAssignment
    per_speaker_errors: Dict[str, int]

    def to_json(self) -> Dict[str, Any]:
        """JSON document of the report.

        Returns:
            JSON-compatible document.
        """
        return {
            "mr": self.mr,
            "ari": self.ari,
            "acp": self.acp,
            "n_clusters": self.n_clusters,
            "assignment": self.assignment.to_json(),
            "per_speaker_errors": dict(self.per_speaker_errors),
        }

    def csv_row(self) -> Tuple[str, ...]:
        """Values matching ``CSV_HEADER``, floats in round-trip precision."""
        return (repr(self.mr), repr(self.ari), repr(self.acp), str(self.n_clusters))

    def write_csv(self, sink: IO[str], header: bool = True) -> None:
        """Write the one-line metric row.

        Args:
            sink: Text stream.
            header: Whether to write ``mr,ari,acp,n_clusters`` first.
                Default: ``True``.
        """
        writer = csv.writer(sink, lineterminator="\n")
        if header:
            writer.writerow(CSV_HEADER)
        writer.writerow(self.csv_row())


def evaluate(
    clustering: Clustering, truth: Sequence[str], labeling: str = "hungarian"
) -> EvaluationReport:
    """Label the clusters and compute all metrics.

    Args:
        clustering: Partition of the items.
        truth: Ground-truth label of every item.
        labeling: ``"hungarian"`` or ``"max"``. Default: ``"hungarian"``.

    Returns:
        The evaluation report.
    """
    assignment = get_labeling(labeling)(clustering, truth)
    mr, per_speaker = misclassification_rate(clustering, truth, assignment)
    return EvaluationReport(
        mr=mr,
        ari=adjusted_rand_index(clustering, truth),
        acp=average_cluster_purity(clustering, truth),
        n_clusters=clustering.n_clusters,
        assignment=assignment,
        per_speaker_errors=per_speaker,
    )
