"""Cluster labeling rules."""
from domclust.labeling.base import (
    UNASSIGNED,
    LabelAssignment,
    LabelingRule,
    count_matrix,
    get_labeling,
)
from domclust.labeling.hungarian import label_hungarian, solve_max_assignment
from domclust.labeling.max_rule import label_max

__all__ = [
    "UNASSIGNED",
    "LabelAssignment",
    "LabelingRule",
    "count_matrix",
    "get_labeling",
    "label_hungarian",
    "label_max",
    "solve_max_assignment",
]
