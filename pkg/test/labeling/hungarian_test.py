"""Compare the Hungarian labeling with exhaustive search over assignments."""
from itertools import permutations

import pytest
import torch
from pytest import mark

from domclust.clustering import Cluster, Clustering
from domclust.labeling import UNASSIGNED, label_hungarian, solve_max_assignment


def brute_force_assignment(counts: torch.Tensor):
    """Lexicographically smallest optimal assignment of the zero-padded table.

    Args:
        counts: Integer table of shape ``[r, l]``.

    Returns:
        Column of every row, ``None`` for padding columns.
    """
    num_rows, num_cols = counts.shape
    size = max(num_rows, num_cols)
    padded = [[0] * size for _ in range(size)]
    for i, row in enumerate(counts.tolist()):
        padded[i][: len(row)] = row

    best, best_score = None, -1
    # permutations come in lexicographic order, keep the first optimum
    for perm in permutations(range(size)):
        score = sum(padded[i][perm[i]] for i in range(size))
        if score > best_score:
            best, best_score = perm, score
    return [col if col < num_cols else None for col in best[:num_rows]]


def _score(counts, assignment):
    return sum(counts[i, j].item() for i, j in enumerate(assignment) if j is not None)


@mark.parametrize(
    "counts, expected",
    [
        ([[1, 5], [4, 0]], [1, 0]),
        ([[5, 1], [4, 0]], [0, 1]),
        ([[3, 3], [3, 3]], [0, 1]),
        ([[0, 0], [0, 0]], [0, 1]),
        ([[2, 7, 1]], [1]),
        ([[4], [9], [1]], [None, 0, None]),
        ([[1, 0, 0], [0, 0, 2], [0, 3, 0]], [0, 2, 1]),
    ],
    ids=str,
)
def test_known_assignments(counts, expected):
    counts = torch.tensor(counts, dtype=torch.long)

    assert solve_max_assignment(counts) == expected
    assert solve_max_assignment(counts) == brute_force_assignment(counts)


def _check_random_table(generator):
    rows = int(torch.randint(1, 8, (1,), generator=generator))
    cols = int(torch.randint(1, 8, (1,), generator=generator))
    high = int(torch.randint(1, 6, (1,), generator=generator))
    counts = torch.randint(high, (rows, cols), generator=generator)

    assignment = solve_max_assignment(counts)
    expected = brute_force_assignment(counts)
    assert _score(counts, assignment) == _score(counts, expected)
    assert assignment == expected

    used = [col for col in assignment if col is not None]
    assert len(used) == len(set(used))
    assert len(used) == min(rows, cols)


@mark.parametrize("seed", range(10))
def test_random_tables_reduced(seed):
    _check_random_table(torch.Generator().manual_seed(seed))


@pytest.mark.fuzz
def test_random_tables():
    generator = torch.Generator().manual_seed(0)
    for _ in range(200):
        _check_random_table(generator)


def test_empty_table():
    assert solve_max_assignment(torch.zeros(0, 0, dtype=torch.long)) == []


def test_label_hungarian():
    clustering = Clustering(
        clusters=(
            Cluster.uniform([0, 1, 2], 0),
            Cluster.uniform([3, 4], 1),
            Cluster.uniform([5], 2),
        ),
        n_items=6,
        source="external",
    )
    truth = ["b", "b", "a", "a", "a", "b"]
    assignment = label_hungarian(clustering, truth)

    assert assignment.method == "hungarian"
    assert assignment.mapping == {0: "b", 1: "a", 2: UNASSIGNED}


def test_more_labels_than_clusters():
    clustering = Clustering(
        clusters=(Cluster.uniform([0, 1, 2, 3], 0),), n_items=4, source="kmeans"
    )
    assignment = label_hungarian(clustering, ["x", "y", "y", "z"])

    assert assignment.mapping == {0: "y"}
