"""Eigengap estimate of the number of clusters."""
import logging

import torch
from einops import rearrange, reduce
from torch import Tensor

from domclust.affinity import AffinityMatrix
from domclust.core.jacobi import jacobi_eigh
from domclust.utils.errors import AffinityError

logger = logging.getLogger(__name__)


def normalized_laplacian(affinity: AffinityMatrix) -> Tensor:
    """Symmetric normalized Laplacian ``L = I - D^{-1/2} A D^{-1/2}``.

    Nodes without edges get ``L_ii = 1`` and zero off-diagonal entries.

    Args:
        affinity: Affinity matrix.

    Returns:
        Laplacian of shape ``[n, n]``, exactly symmetric.
    """
    values = affinity.values
    degree = reduce(values, "i j -> i", "sum")
    inv_sqrt = torch.where(
        degree > 0, degree.clamp(min=1e-300).rsqrt(), torch.zeros_like(degree)
    )
    scale = rearrange(inv_sqrt, "i -> i 1") * rearrange(inv_sqrt, "j -> 1 j")
    identity = torch.eye(affinity.n, dtype=values.dtype)
    return identity - values * scale


def eigengap_estimate(affinity: AffinityMatrix) -> int:
    """Number of clusters at the largest gap of the Laplacian spectrum.

    With eigenvalues ``λ_1 <= ... <= λ_n`` of the normalized Laplacian, returns
    the ``k`` in ``[1, n-1]`` that maximizes ``λ_{k+1} - λ_k``, ties going to
    the smaller ``k``.

    Args:
        affinity: Affinity matrix with at least two nodes.

    Returns:
        Estimated number of clusters.

    Raises:
        AffinityError: for fewer than two nodes
    """
    if affinity.n < 2:
        raise AffinityError(f"Eigengap needs at least 2 nodes, got {affinity.n}.")
    eigvals, _ = jacobi_eigh(normalized_laplacian(affinity))
    gaps = eigvals[1:] - eigvals[:-1]
    k = int(torch.argmax(gaps)) + 1
    logger.debug(f"Eigengap estimate k={k}, gap {gaps[k - 1].item():.4g}")
    return k
