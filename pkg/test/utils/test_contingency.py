"""Test contingency tables and label encoding."""
import torch

from domclust.utils.contingency import contingency_table, encode, marginals


def test_encode_sorts_values():
    distinct, index = encode(["b", "a", "c", "a"])

    assert distinct == ["a", "b", "c"]
    assert index.tolist() == [1, 0, 2, 0]


def test_contingency_table():
    rows = torch.tensor([0, 0, 1, 1, 1])
    cols = torch.tensor([1, 0, 1, 1, 2])
    table = contingency_table(rows, cols)

    assert table.tolist() == [[1, 1, 0], [0, 2, 1]]
    assert marginals(table) == ([2, 3], [1, 3, 1])


def test_contingency_table_empty_classes():
    table = contingency_table(
        torch.tensor([0]), torch.tensor([0]), num_rows=2, num_cols=3
    )

    assert table.tolist() == [[1, 0, 0], [0, 0, 0]]
