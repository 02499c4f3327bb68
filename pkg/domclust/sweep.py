"""Sensitivity of the dominant-set pipeline to the threshold and the precision."""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import IO, Callable, Iterable, List, Sequence, Tuple

from domclust.affinity import DEFAULT_KNN, AffinityMatrix, build_affinity
from domclust.core.peeling import peel_clusters
from domclust.core.replicator import SolverConfig
from domclust.embeddings import EmbeddingSet
from domclust.metrics import evaluate
from domclust.utils.errors import DomclustInputError, LabelingError
from domclust.utils.hooks import no_op

logger = logging.getLogger(__name__)

DEFAULT_THETAS = (
    0.0,
    0.0005,
    0.001,
    0.005,
    0.01,
    0.05,
    0.1,
    0.15,
    0.2,
    0.3,
    0.4,
    0.5,
    0.67,
    0.8,
    0.9,
    0.99,
    0.9995,
)
DEFAULT_EPSILONS = (1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
CSV_HEADER = ("theta", "epsilon", "mr", "ari", "acp", "n_clusters")


@dataclass(frozen=True)
class SweepRow:
    """Metrics of one grid cell."""

    theta: float
    epsilon: float
    mr: float
    ari: float
    acp: float
    n_clusters: int


@dataclass(frozen=True)
class SweepGrid:
    """Grid of thresholds and precisions, with one metric row per cell.

    Attributes:
        thetas: Strictly increasing thresholds in ``[0, 1)``.
        epsilons: Strictly increasing positive precisions.
        rows: Metric rows, theta outer and epsilon inner. Empty until filled by
            ``run_sweep``.
    """

    thetas: Tuple[float, ...] = DEFAULT_THETAS
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    rows: Tuple[SweepRow, ...] = ()

    def __post_init__(self):
        """Validate the axes.

        Raises:
            DomclustInputError: for empty, unsorted or out-of-range axes
        """
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "rows", tuple(self.rows))
        for name, axis in (("thetas", self.thetas), ("epsilons", self.epsilons)):
            if not axis:
                raise DomclustInputError(f"Sweep axis {name} is empty.")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise DomclustInputError(
                    f"Sweep axis {name} is not strictly increasing."
                )
        if not (0.0 <= self.thetas[0] and self.thetas[-1] < 1.0):
            raise DomclustInputError("Sweep thetas must lie in [0, 1).")
        if self.epsilons[0] <= 0.0:
            raise DomclustInputError("Sweep epsilons must be positive.")

    def cells(self) -> List[Tuple[float, float]]:
        """Grid cells in row-major order, theta outer."""
        return [(theta, eps) for theta in self.thetas for eps in self.epsilons]


def _evaluate_cell(
    affinity: AffinityMatrix,
    truth: Sequence[str],
    theta: float,
    epsilon: float,
    max_iterations: int,
    labeling: str,
) -> SweepRow:
    config = SolverConfig(theta=theta, epsilon=epsilon, max_iterations=max_iterations)
    report = evaluate(peel_clusters(affinity, config), truth, labeling=labeling)
    return SweepRow(
        theta=theta,
        epsilon=epsilon,
        mr=report.mr,
        ari=report.ari,
        acp=report.acp,
        n_clusters=report.n_clusters,
    )


def run_sweep(
    embeddings: EmbeddingSet,
    grid: SweepGrid = SweepGrid(),
    knn: int = DEFAULT_KNN,
    labeling: str = "hungarian",
    max_iterations: int = 10_000,
    n_workers: int = 1,
    cell_hook: Callable[[SweepRow], None] = no_op,
) -> SweepGrid:
    """Evaluate the full pipeline on every cell of a (theta, epsilon) grid.

    The affinity matrix is built once and shared by all cells.

    Args:
        embeddings: Labeled embedding set.
        grid: Axes of the sweep. Default: ``SweepGrid()``.
        knn: Neighborhood size of the local scaling. Default: ``DEFAULT_KNN``.
        labeling: ``"hungarian"`` or ``"max"``. Default: ``"hungarian"``.
        max_iterations: Iteration cap of the replicator dynamics.
            Default: ``10_000``.
        n_workers: Number of threads evaluating cells. Default: ``1``.
        cell_hook: Called with every finished row, in completion order.
            Default: ``no_op``.

    Returns:
        The grid with one row per cell, theta outer and epsilon inner.

    Raises:
        LabelingError: if the embedding set is unlabeled
    """
    if not embeddings.is_labeled:
        raise LabelingError("A sweep needs a labeled embedding set.")

    affinity = build_affinity(embeddings, knn=knn)
    truth = embeddings.labels
    cells = grid.cells()
    logger.debug(f"Sweeping {len(cells)} cells with {n_workers} worker(s)")

    def work(cell: Tuple[float, float]) -> SweepRow:
        row = _evaluate_cell(affinity, truth, *cell, max_iterations, labeling)
        cell_hook(row)
        return row

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as executor:
            rows = list(executor.map(work, cells))
    else:
        rows = [work(cell) for cell in cells]

    order = {cell: position for position, cell in enumerate(cells)}
    rows.sort(key=lambda row: order[(row.theta, row.epsilon)])
    return replace(grid, rows=tuple(rows))


def best_cell(rows: Iterable[SweepRow]) -> SweepRow:
    """Best parameter choice: lowest MR, then highest ARI, smallest theta and epsilon.

    Args:
        rows: Sweep rows.

    Returns:
        The best row.

    Raises:
        DomclustInputError: if there are no rows
    """
    rows = list(rows)
    if not rows:
        raise DomclustInputError("No sweep rows to choose from.")
    return min(rows, key=lambda row: (row.mr, -row.ari, row.theta, row.epsilon))


def write_sweep_csv(rows: Iterable[SweepRow], sink: IO[str]) -> None:
    """Write sweep rows with header ``theta,epsilon,mr,ari,acp,n_clusters``.

    Args:
        rows: Sweep rows.
        sink: Text stream.
    """
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                repr(row.theta),
                repr(row.epsilon),
                repr(row.mr),
                repr(row.ari),
                repr(row.acp),
                str(row.n_clusters),
            ]
        )
