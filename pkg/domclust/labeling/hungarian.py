"""Optimal one-to-one labeling with the Hungarian method.

Counts ``c[i, j]`` of label ``j`` in cluster ``i`` become costs
``ĉ = max(c) - c``. A rectangular table is padded to a square with dummy
entries of count zero. Among all optimal assignments, the lexicographically
smallest one over (cluster rank, label index) is returned.
"""
from collections import deque
from typing import Dict, List, Optional, Tuple

import torch
from torch import Tensor

from domclust.clustering import Clustering
from domclust.labeling.base import UNASSIGNED, LabelingRule, count_matrix


def _shortest_augmenting_path(cost: Tensor) -> Tuple[Tensor, Tensor, Tensor]:
    """Solve the square minimum-cost assignment problem on integer costs.

    Kuhn-Munkres with row and column potentials. Rows are inserted one at a
    time and matched along a shortest augmenting path. Arrays use 1-based
    indices with a virtual column 0.

    Args:
        cost: Integer cost matrix of shape ``[n, n]``.

    Returns:
        Row of every column (``owner[j]`` for ``j = 1..n``, 1-based), and the
        row and column potentials ``u``, ``v`` (1-based).
    """
    n = cost.shape[0]
    big = int(cost.abs().sum()) + 1
    u = torch.zeros(n + 1, dtype=torch.long)
    v = torch.zeros(n + 1, dtype=torch.long)
    owner = torch.zeros(n + 1, dtype=torch.long)
    way = torch.zeros(n + 1, dtype=torch.long)

    for row in range(1, n + 1):
        owner[0] = row
        j0 = 0
        minv = torch.full((n + 1,), big, dtype=torch.long)
        used = torch.zeros(n + 1, dtype=torch.bool)
        while True:
            used[j0] = True
            i0 = int(owner[j0])
            free = ~used[1:]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:] = torch.where(better, reduced, minv[1:])
            way[1:] = torch.where(better, torch.full_like(way[1:], j0), way[1:])

            candidates = torch.where(free, minv[1:], torch.full_like(minv[1:], big))
            j1 = int(torch.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            u[owner[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if owner[j0] == 0:
                break

        while j0:
            j1 = int(way[j0])
            owner[j0] = owner[j1]
            j0 = j1

    return owner, u, v


def _alternating_path(
    start: int,
    target: int,
    forbidden_col: int,
    tight: Tensor,
    match: List[int],
    owner: List[int],
    active_cols: List[bool],
) -> Optional[List[Tuple[int, int]]]:
    """Find rematches that give row ``start`` a new column, ending on ``target``.

    Breadth-first search over tight edges. Row ``start`` has lost its column.
    It may take any active tight column except ``forbidden_col``, which
    displaces that column's owner, until some row takes the free ``target``.

    Args:
        start: Row that needs a new column.
        target: Column that became free.
        forbidden_col: Column that must not be used.
        tight: Boolean matrix of zero reduced cost edges.
        match: Current column of every row.
        owner: Current row of every column.
        active_cols: Whether a column may still be rematched.

    Returns:
        The new (row, column) pairs along the path, or ``None``.
    """
    reached_from: Dict[int, int] = {}
    queue = deque([start])
    while queue:
        row = queue.popleft()
        for col in tight[row].nonzero().flatten().tolist():
            if col == forbidden_col or not active_cols[col] or col in reached_from:
                continue
            reached_from[col] = row
            if col == target:
                path = []
                while True:
                    row = reached_from[col]
                    path.append((row, col))
                    if row == start:
                        return path
                    col = match[row]
            queue.append(owner[col])
    return None


def _canonicalize(assignment: List[int], tight: Tensor) -> List[int]:
    """Turn a perfect tight matching into the lexicographically smallest one.

    Rows are fixed in order. Each row takes the smallest column that still
    leaves a perfect tight matching on the rows and columns not yet fixed.

    Args:
        assignment: Column of every row in a perfect matching of ``tight``.
        tight: Boolean matrix of zero reduced cost edges.

    Returns:
        Column of every row.
    """
    n = len(assignment)
    match = list(assignment)
    owner = [0] * n
    for row, col in enumerate(match):
        owner[col] = row
    active_cols = [True] * n

    for row in range(n):
        for col in tight[row].nonzero().flatten().tolist():
            if not active_cols[col]:
                continue
            if match[row] == col:
                break
            path = _alternating_path(
                owner[col], match[row], col, tight, match, owner, active_cols
            )
            if path is None:
                continue
            for r, c in path:
                match[r] = c
                owner[c] = r
            match[row], owner[col] = col, row
            break
        active_cols[match[row]] = False
    return match


def solve_max_assignment(counts: Tensor) -> List[Optional[int]]:
    """Match rows to columns maximizing the total count.

    Args:
        counts: Non-negative integer matrix of shape ``[r, l]``.

    Returns:
        Column of every row, ``None`` for rows matched to a padding column.
        Among optimal assignments, the lexicographically smallest.
    """
    num_rows, num_cols = counts.shape
    size = max(num_rows, num_cols)
    if size == 0:
        return []
    counts = counts.to(torch.long)
    top = int(counts.max()) if counts.numel() > 0 else 0

    cost = torch.full((size, size), top, dtype=torch.long)
    cost[:num_rows, :num_cols] = top - counts

    owner, u, v = _shortest_augmenting_path(cost)
    assignment = [0] * size
    for col in range(1, size + 1):
        assignment[int(owner[col]) - 1] = col - 1

    tight = (cost - u[1:].unsqueeze(1) - v[1:].unsqueeze(0)) == 0
    assignment = _canonicalize(assignment, tight)
    return [col if col < num_cols else None for col in assignment[:num_rows]]


class HungarianLabeling(LabelingRule):
    """Label clusters by the assignment that maximizes correctly labeled items.

    Clusters matched to a padding column stay ``UNASSIGNED``; labels matched
    to a padding row are unused.
    """

    method = "hungarian"

    def _label(
        self, clustering: Clustering, truth: List[str]
    ) -> Dict[int, Optional[str]]:
        labels, counts = count_matrix(clustering, truth)
        columns = solve_max_assignment(counts)
        return {
            cluster.rank: UNASSIGNED if col is None else labels[col]
            for cluster, col in zip(clustering.clusters, columns)
        }


label_hungarian = HungarianLabeling()
