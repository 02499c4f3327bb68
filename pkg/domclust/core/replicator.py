"""Replicator dynamics on the standard simplex.

Iterates ``x_i <- x_i (Ax)_i / (xᵀAx)`` from the barycenter until two successive
iterates are closer than ``epsilon`` in L2 norm. The payoff ``xᵀAx`` never
decreases along the trajectory for symmetric, non-negative ``A``.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import torch
from torch import Tensor

from domclust.affinity import AffinityMatrix
from domclust.context import CTX
from domclust.utils.errors import (
    DisconnectedGraphError,
    DomclustInputError,
    SolverError,
)
from domclust.utils.hooks import no_op
from domclust.utils.subsampling import submatrix

logger = logging.getLogger(__name__)

# largest tangent eigenvalue that still certifies a strict local maximum
STRICT_MAX_TOL = -1e-10
# payoff loss tolerated when leaving a saddle point, absolute and per unit epsilon
ESCAPE_PAYOFF_TOL = 1e-13
ESCAPE_PAYOFF_RTOL = 1e-6
# first-order payoff change below which an escape direction counts as flat
FLAT_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the dominant-set extraction.

    Attributes:
        theta: Relative support threshold in ``[0, 1)``. A node belongs to the
            support if its weight exceeds ``theta * max(x)``. Default: ``0.1``.
        epsilon: Convergence precision, bound on the L2 distance of successive
            iterates. Default: ``1e-6``.
        max_iterations: Iteration cap per extracted cluster. Default: ``10_000``.
        escape_saddles: Leave fixed points that are not strict local maximizers
            of the payoff on their support. Default: ``True``.
        extinction: Zero out vanishing components of the converged vector.
            Default: ``True``.
    """

    theta: float = 0.1
    epsilon: float = 1e-6
    max_iterations: int = 10_000
    escape_saddles: bool = True
    extinction: bool = True

    def __post_init__(self):
        """Validate the parameters.

        Raises:
            DomclustInputError: if a parameter is out of range
        """
        if not 0.0 <= self.theta < 1.0:
            raise DomclustInputError(f"theta must lie in [0, 1), got {self.theta}.")
        if not self.epsilon > 0.0:
            raise DomclustInputError(f"epsilon must be positive, got {self.epsilon}.")
        if self.max_iterations < 1:
            raise DomclustInputError(
                f"max_iterations must be positive, got {self.max_iterations}."
            )


@dataclass(frozen=True, eq=False)
class CharacteristicVector:
    """Point on the simplex returned by the replicator dynamics.

    Attributes:
        weights: Non-negative weights summing to 1, shape ``[k]``.
        iterations: Number of replicator steps carried out.
        converged: Whether the step size fell below ``epsilon``.
        payoff: Final value of ``xᵀAx``.
        saddle_escapes: Number of moves away from non-strict fixed points.
    """

    weights: Tensor
    iterations: int
    converged: bool
    payoff: float
    saddle_escapes: int = 0


def _payoff(values: Tensor, x: Tensor) -> Tuple[Tensor, Tensor]:
    fitness = values @ x
    return fitness, torch.dot(x, fitness)


def replicator_dynamics(
    affinity: Union[AffinityMatrix, Tensor],
    config: SolverConfig = SolverConfig(),
    step_hook: Callable[[int, Tensor, float], None] = no_op,
) -> CharacteristicVector:
    """Run the replicator dynamics from the barycenter of the simplex.

    Args:
        affinity: Symmetric, non-negative matrix with zero diagonal.
        config: Solver parameters. Default: ``SolverConfig()``.
        step_hook: Called as ``step_hook(iteration, x, payoff)`` after every
            replicator step. Default: ``no_op``.

    Returns:
        The last iterate, with convergence information.

    Raises:
        DisconnectedGraphError: if ``xᵀAx = 0`` at the barycenter
        SolverError: if non-finite values occur
    """
    values = affinity.values if isinstance(affinity, AffinityMatrix) else affinity
    k = values.shape[0]

    x = torch.full((k,), 1.0 / k, dtype=values.dtype)
    fitness, payoff = _payoff(values, x)
    if not torch.isfinite(payoff):
        raise SolverError(f"Non-finite payoff at the barycenter of {k} nodes.")
    if payoff <= 0:
        raise DisconnectedGraphError(f"Subgraph of {k} nodes has no edges.")

    iterations, escapes, converged = 0, 0, False
    while iterations < config.max_iterations:
        x_new = x * fitness / payoff
        x_new = x_new / x_new.sum()
        iterations += 1
        if not torch.isfinite(x_new).all():
            raise SolverError(f"Non-finite weights after {iterations} iterations.")

        step = torch.linalg.norm(x_new - x)
        x = x_new
        fitness, payoff = _payoff(values, x)
        step_hook(iterations, x, payoff.item())

        if step <= config.epsilon:
            if config.extinction:
                x = _extinguish(x, fitness, payoff, config.epsilon)
                fitness, payoff = _payoff(values, x)
            escaped = (
                _escape_saddle(values, x, fitness, payoff, config)
                if config.escape_saddles
                else None
            )
            if escaped is None:
                converged = True
                break
            x = escaped
            fitness, payoff = _payoff(values, x)
            escapes += 1

    if config.extinction:
        x = _extinguish(x, fitness, payoff, config.epsilon)
        fitness, payoff = _payoff(values, x)

    if CTX.get_debug():
        logger.debug(
            f"Replicator dynamics on {k} nodes: {iterations} iterations, "
            f"converged={converged}, payoff={payoff.item():.6g}, escapes={escapes}"
        )
    return CharacteristicVector(
        weights=x,
        iterations=iterations,
        converged=converged,
        payoff=payoff.item(),
        saddle_escapes=escapes,
    )


def _tangent_basis(size: int, dtype: torch.dtype) -> Tensor:
    """Orthonormal basis of ``{y : sum(y) = 0}`` as columns, shape ``[size, size-1]``.

    Args:
        size: Dimension of the ambient space.
        dtype: Data type of the basis.

    Returns:
        Basis matrix.
    """
    spanning = torch.cat(
        [torch.ones(size, 1, dtype=dtype), torch.eye(size, dtype=dtype)], dim=1
    )
    Q, _ = torch.linalg.qr(spanning)
    return Q[:, 1:size]


def _escape_saddle(
    values: Tensor, x: Tensor, fitness: Tensor, payoff: Tensor, config: SolverConfig
) -> Optional[Tensor]:
    """Move away from a fixed point that is not a strict local maximizer.

    On the support ``S`` (weights above ``max(theta, sqrt(epsilon)) * max(x)``),
    the point is a strict local maximizer if ``A_S`` is negative definite on the
    tangent space of the face. Otherwise the point moves along the leading
    tangent eigenvector, oriented uphill, until the first coordinates hit zero.
    Where the slope is flat, the opposite orientation is tried as well.

    Args:
        values: Affinity matrix.
        x: Converged iterate.
        fitness: ``Ax``.
        payoff: ``xᵀAx``.
        config: Solver parameters.

    Returns:
        The new point, or ``None`` if ``x`` is a strict local maximizer or no
        move preserves the payoff.
    """
    cutoff = max(config.theta, math.sqrt(config.epsilon)) * x.max()
    support = (x > cutoff).nonzero().flatten()
    size = support.numel()
    if size < 2:
        return None

    basis = _tangent_basis(size, values.dtype)
    curvature = basis.T @ submatrix(values, support) @ basis
    curvature = (curvature + curvature.T) / 2
    eigvals, eigvecs = torch.linalg.eigh(curvature)
    if eigvals[-1] < STRICT_MAX_TOL:
        return None

    direction = torch.zeros_like(x)
    direction[support] = basis @ eigvecs[:, -1]
    slope = torch.dot(direction, fitness)
    if abs(slope) <= FLAT_SLOPE_TOL:
        magnitude = direction.abs()
        lead = (magnitude >= magnitude.max() - 1e-9).nonzero()[0, 0]
        if direction[lead] < 0:
            direction = -direction
        # flat slope: the opposite orientation is the fallback
        candidates = [direction, -direction]
    else:
        candidates = [direction if slope > 0 else -direction]

    tolerance = max(ESCAPE_PAYOFF_TOL, ESCAPE_PAYOFF_RTOL * config.epsilon)
    for candidate in candidates:
        moved = _move_to_face(x, candidate)
        if moved is None:
            continue
        _, new_payoff = _payoff(values, moved)
        if new_payoff < payoff - tolerance:
            continue
        if CTX.get_debug():
            logger.debug(
                f"Left non-strict fixed point on {size} nodes, "
                f"curvature {eigvals[-1].item():.3e}, payoff "
                f"{payoff.item():.6g} -> {new_payoff.item():.6g}"
            )
        return moved
    return None


def _move_to_face(x: Tensor, direction: Tensor) -> Optional[Tensor]:
    """Follow ``direction`` from ``x`` until the first coordinates reach zero.

    Args:
        x: Point on the simplex.
        direction: Tangent direction, summing to zero.

    Returns:
        The point on the boundary face, or ``None`` if no coordinate decreases.
    """
    shrinking = direction < 0
    if not shrinking.any():
        return None
    ratios = torch.full_like(x, float("inf"))
    ratios[shrinking] = x[shrinking] / -direction[shrinking]
    step = ratios.min()

    moved = (x + step * direction).clamp(min=0.0)
    moved[ratios <= step * (1 + 1e-9)] = 0.0
    return moved / moved.sum()


def _extinguish(x: Tensor, fitness: Tensor, payoff: Tensor, epsilon: float) -> Tensor:
    """Set components that the dynamics drives to zero to exactly zero.

    A component is extinct if its fitness is below the payoff and its weight is
    at most ``sqrt(epsilon) * max(x)``. The largest component always survives.

    Args:
        x: Converged iterate.
        fitness: ``Ax``.
        payoff: ``xᵀAx``.
        epsilon: Convergence precision.

    Returns:
        Iterate with extinct components removed, renormalized.
    """
    dying = (fitness < payoff) & (x <= math.sqrt(epsilon) * x.max())
    dying[torch.argmax(x)] = False
    if not dying.any():
        return x
    x = torch.where(dying, torch.zeros_like(x), x)
    return x / x.sum()


def extract_support(
    x: Union[CharacteristicVector, Tensor], theta: float = 0.1
) -> Tensor:
    """Nodes whose weight is strictly greater than ``theta * max(x)``.

    Args:
        x: Characteristic vector or weight tensor.
        theta: Relative threshold in ``[0, 1)``. Default: ``0.1``.

    Returns:
        Ascending node indices, never empty.

    Raises:
        DomclustInputError: if ``theta`` is out of range
    """
    if not 0.0 <= theta < 1.0:
        raise DomclustInputError(f"theta must lie in [0, 1), got {theta}.")
    weights = x.weights if isinstance(x, CharacteristicVector) else x
    return (weights > theta * weights.max()).nonzero().flatten()
