"""Cyclic Jacobi eigensolver for dense symmetric matrices."""
import logging
import math
from typing import Tuple

import torch
from torch import Tensor

from domclust.context import CTX
from domclust.utils.errors import EigensolverError

logger = logging.getLogger(__name__)


def _off_diagonal_norm(matrix: Tensor) -> float:
    return math.sqrt(2.0) * torch.linalg.norm(torch.triu(matrix, diagonal=1)).item()


def _rotation(a_pp: float, a_qq: float, a_pq: float) -> Tuple[float, float]:
    """Cosine and sine of the rotation that annihilates ``a_pq``.

    Args:
        a_pp: Diagonal entry ``p``.
        a_qq: Diagonal entry ``q``.
        a_pq: Off-diagonal entry to annihilate, non-zero.

    Returns:
        ``(c, s)``.
    """
    theta = (a_qq - a_pp) / (2.0 * a_pq)
    sign = 1.0 if theta >= 0 else -1.0
    t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def jacobi_eigh(
    matrix: Tensor, tol: float = 1e-10, max_sweeps: int = 100
) -> Tuple[Tensor, Tensor]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Every sweep annihilates each off-diagonal pair ``(p, q)``, ``p < q``, in
    row-major order. Iteration stops once the Frobenius norm of the
    off-diagonal part is at most ``tol``.

    Args:
        matrix: Symmetric matrix of shape ``[n, n]``.
        tol: Threshold on the off-diagonal Frobenius norm. Default: ``1e-10``.
        max_sweeps: Maximum number of sweeps. Default: ``100``.

    Returns:
        Eigenvalues in ascending order, shape ``[n]``, and the matching
        orthonormal eigenvectors as columns, shape ``[n, n]``.

    Raises:
        EigensolverError: if the threshold is not met within ``max_sweeps``
    """
    A = matrix.clone().to(torch.float64)
    n = A.shape[0]
    V = torch.eye(n, dtype=A.dtype)

    for sweep in range(max_sweeps + 1):
        off = _off_diagonal_norm(A)
        if off <= tol:
            if CTX.get_debug():
                logger.debug(f"Jacobi converged after {sweep} sweeps on n={n}")
            eigvals = torch.diagonal(A).clone()
            order = torch.sort(eigvals, stable=True).indices
            return eigvals[order], V[:, order]
        if sweep == max_sweeps:
            break

        for p in range(n - 1):
            for q in range(p + 1, n):
                a_pq = A[p, q].item()
                if a_pq == 0.0:
                    continue
                c, s = _rotation(A[p, p].item(), A[q, q].item(), a_pq)
                pair = [p, q]
                col_rotation = torch.tensor([[c, s], [-s, c]], dtype=A.dtype)
                A[:, pair] = A[:, pair] @ col_rotation
                A[pair, :] = col_rotation.T @ A[pair, :]
                A[p, q] = A[q, p] = 0.0
                V[:, pair] = V[:, pair] @ col_rotation

    raise EigensolverError(
        f"Jacobi eigensolver did not converge within {max_sweeps} sweeps "
        f"(off-diagonal norm {off:.3e} > {tol:.1e})."
    )
