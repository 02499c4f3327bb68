"""Dominant-set extraction and the dense symmetric eigensolver."""
from domclust.core.jacobi import jacobi_eigh
from domclust.core.peeling import peel_clusters
from domclust.core.replicator import (
    CharacteristicVector,
    SolverConfig,
    extract_support,
    replicator_dynamics,
)

__all__ = [
    "CharacteristicVector",
    "SolverConfig",
    "extract_support",
    "jacobi_eigh",
    "peel_clusters",
    "replicator_dynamics",
]
