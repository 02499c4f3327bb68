"""Contingency tables between a partition and ground-truth labels."""
from typing import Hashable, List, Sequence, Tuple

from einops import reduce
from torch import Tensor, as_tensor, einsum, long
from torch.nn.functional import one_hot


def encode(values: Sequence[Hashable]) -> Tuple[List[Hashable], Tensor]:
    """Map hashable values to indices ``0, ..., K-1`` in sorted value order.

    Args:
        values: Value per item.

    Returns:
        Sorted distinct values and the index of each item's value.
    """
    distinct = sorted(set(values))
    position = {value: idx for idx, value in enumerate(distinct)}
    return distinct, as_tensor([position[v] for v in values], dtype=long)


def contingency_table(
    rows: Tensor, cols: Tensor, num_rows: int = None, num_cols: int = None
) -> Tensor:
    """Count items per (row class, column class) pair.

    Args:
        rows: Row class index of every item. Has shape ``[N]``.
        cols: Column class index of every item. Has shape ``[N]``.
        num_rows: Number of row classes. Default: ``rows.max() + 1``.
        num_cols: Number of column classes. Default: ``cols.max() + 1``.

    Returns:
        Integer table ``n[i, j]`` of shape ``[num_rows, num_cols]``.
    """
    num_rows = int(rows.max()) + 1 if num_rows is None else num_rows
    num_cols = int(cols.max()) + 1 if num_cols is None else num_cols
    row_hot = one_hot(rows, num_classes=num_rows)
    col_hot = one_hot(cols, num_classes=num_cols)
    return einsum("ni,nj->ij", row_hot, col_hot)


def marginals(table: Tensor) -> Tuple[List[int], List[int]]:
    """Row and column sums of a contingency table as Python integers.

    Args:
        table: Integer contingency table.

    Returns:
        Row sums ``n[i.]`` and column sums ``n[.j]``.
    """
    row_sums = reduce(table, "i j -> i", "sum")
    col_sums = reduce(table, "i j -> j", "sum")
    return row_sums.tolist(), col_sums.tolist()
