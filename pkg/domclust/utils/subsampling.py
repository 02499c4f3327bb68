"""Utility functions to restrict tensors to a subset of items."""
from typing import Sequence

from torch import Tensor, as_tensor, long


def subsample(
    tensor: Tensor, dim: int = 0, subsampling: Sequence[int] = None
) -> Tensor:
    """Select items from a tensor along a dimension.

    Args:
        tensor: Tensor to select from.
        dim: Selection dimension. Defaults to ``0``.
        subsampling: Indices of items that are sliced along the dimension.
            Defaults to ``None`` (use all items).

    Returns:
        Tensor of same rank that is sub-sampled along the dimension.
    """
    if subsampling is None:
        return tensor
    else:
        index = as_tensor(subsampling, dtype=long)
        return tensor[(slice(None),) * dim + (index,)]


def submatrix(matrix: Tensor, indices: Sequence[int]) -> Tensor:
    """Restrict a square matrix to the rows and columns in ``indices``.

    Entry ``[a, b]`` of the result is ``matrix[indices[a], indices[b]]``.

    Args:
        matrix: Square matrix.
        indices: Original indices of the retained items, in result order.

    Returns:
        Square matrix of size ``len(indices)``.
    """
    rows = subsample(matrix, dim=0, subsampling=indices)
    return subsample(rows, dim=1, subsampling=indices)
