"""Convert graph problem settings."""
import copy

import torch

from domclust.affinity import AffinityMatrix
from domclust.core.replicator import SolverConfig


def make_test_problems(settings):
    """Create test problems from settings."""
    return [GraphTestProblem(**add_missing_defaults(copy.copy(s))) for s in settings]


def add_missing_defaults(setting):
    """Add missing entries in settings such that the new format works."""
    required = ["affinity_fn"]
    optional = {
        "config": SolverConfig(),
        "expected_clusters": None,
        "seed": 0,
        "id_prefix": "",
    }

    for req in required:
        if req not in setting.keys():
            raise ValueError(f"Missing configuration entry for {req}")

    for opt, default in optional.items():
        if opt not in setting.keys():
            setting[opt] = default

    for s in setting.keys():
        if s not in required and s not in optional.keys():
            raise ValueError(f"Unknown config: {s}")

    return setting


class GraphTestProblem:
    def __init__(self, affinity_fn, config, expected_clusters, seed, id_prefix):
        """Collection of information required to test the dominant-set solvers.

        Warning:
            Initialization is lazy. ``set_up`` needs to be called before the
            test problem can be used.

        Args:
            affinity_fn (callable): Returns the affinity matrix as a tensor.
            config (SolverConfig): Solver parameters.
            expected_clusters (list(set(int)) or None): Known peeling result,
                in extraction order.
            seed (int): Seed of torch's global generator before ``affinity_fn``.
            id_prefix (str): Prefix used for test ID.
        """
        self.affinity_fn = affinity_fn
        self.config = config
        self.expected_clusters = expected_clusters
        self.seed = seed
        self.id_prefix = id_prefix

    def set_up(self):
        torch.manual_seed(self.seed)
        self.affinity = AffinityMatrix.from_values(self.affinity_fn())

    def tear_down(self):
        del self.affinity

    def make_id(self):
        """Human-readable ID of the problem."""
        prefix = f"{self.id_prefix}-" if self.id_prefix else ""
        return (
            f"{prefix}theta={self.config.theta}-epsilon={self.config.epsilon}"
            f"-seed={self.seed}"
        )
