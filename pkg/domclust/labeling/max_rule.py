"""Prototype labeling: a cluster takes the label of its heaviest member."""
from typing import Dict, List, Optional

import torch

from domclust.clustering import Clustering
from domclust.labeling.base import UNASSIGNED, LabelingRule
from domclust.utils.errors import LabelingError


class MaxLabeling(LabelingRule):
    """Label each cluster with the true label of its maximum-weight member.

    Clusters are visited in extraction order. A cluster whose prototype label
    was already taken by an earlier cluster stays ``UNASSIGNED``. Weight ties go
    to the lower item index.

    Only dominant-set clusterings carry the characteristic-vector weights this
    rule needs.
    """

    method = "max"

    def _label(
        self, clustering: Clustering, truth: List[str]
    ) -> Dict[int, Optional[str]]:
        if not clustering.has_weights:
            raise LabelingError(
                f"Max labeling needs characteristic-vector weights, "
                f"but the clustering comes from {clustering.source!r}."
            )

        taken = set()
        mapping = {}
        for cluster in clustering.clusters:
            weights = torch.tensor(cluster.weights, dtype=torch.float64)
            prototype = cluster.members[int(torch.argmax(weights))]
            label = truth[prototype]
            if label in taken:
                mapping[cluster.rank] = UNASSIGNED
            else:
                mapping[cluster.rank] = label
                taken.add(label)
        return mapping


label_max = MaxLabeling()
