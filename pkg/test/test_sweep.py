"""Test the threshold/precision sensitivity sweep."""
import io

from pytest import fixture, mark, raises

from domclust.context import CTX
from domclust.embeddings import EmbeddingSet, synth_embeddings
from domclust.sweep import (
    DEFAULT_EPSILONS,
    DEFAULT_THETAS,
    SweepGrid,
    SweepRow,
    best_cell,
    run_sweep,
    write_sweep_csv,
)
from domclust.utils.errors import DomclustInputError, LabelingError

PLATEAU_GRID = SweepGrid(thetas=(0.0, 0.1, 0.3, 0.5), epsilons=(1e-8, 1e-6, 1e-4))


@fixture(scope="module")
def noise_free():
    """Ten clusters of four identical unit vectors in dimension 32."""
    return synth_embeddings(10, 4, 32, 0.0, seed=0)


def test_plateau_on_noise_free_data(noise_free: EmbeddingSet):
    CTX.reset_affinity_builds()
    result = run_sweep(noise_free, PLATEAU_GRID)

    assert CTX.get_affinity_builds() == 1
    assert [(row.theta, row.epsilon) for row in result.rows] == PLATEAU_GRID.cells()
    for row in result.rows:
        assert (row.mr, row.ari, row.acp, row.n_clusters) == (0.0, 1.0, 1.0, 10)


def test_threads_give_identical_rows():
    embeddings = synth_embeddings(4, 5, 8, 0.4, seed=3)
    grid = SweepGrid(thetas=(0.0, 0.2, 0.6), epsilons=(1e-6, 1e-3))
    finished = []

    sequential = run_sweep(embeddings, grid)
    threaded = run_sweep(embeddings, grid, n_workers=3, cell_hook=finished.append)

    assert threaded.rows == sequential.rows
    assert sorted(finished, key=lambda r: (r.theta, r.epsilon)) == list(
        sequential.rows
    )


def test_higher_theta_never_merges_clusters():
    """A stricter support threshold peels smaller clusters, hence more of them."""
    embeddings = synth_embeddings(8, 5, 16, 0.3, seed=2)
    grid = SweepGrid(thetas=(0.1, 0.9995), epsilons=(1e-6,))

    loose, strict = run_sweep(embeddings, grid).rows

    assert (loose.theta, strict.theta) == (0.1, 0.9995)
    assert strict.n_clusters >= loose.n_clusters


def test_needs_labels():
    embeddings = synth_embeddings(2, 2, 4, 0.1, seed=0)
    unlabeled = EmbeddingSet(
        ids=embeddings.ids, labels=None, vectors=embeddings.vectors
    )

    with raises(LabelingError):
        run_sweep(unlabeled, PLATEAU_GRID)


def test_default_grid():
    grid = SweepGrid()

    assert grid.thetas == DEFAULT_THETAS
    assert grid.epsilons == DEFAULT_EPSILONS
    assert len(grid.cells()) == 170
    assert grid.cells()[:2] == [(0.0, 1e-11), (0.0, 1e-10)]


@mark.parametrize(
    "thetas, epsilons",
    [
        ((), (1e-6,)),
        ((0.1,), ()),
        ((0.2, 0.1), (1e-6,)),
        ((0.1, 0.1), (1e-6,)),
        ((0.5, 1.0), (1e-6,)),
        ((-0.1,), (1e-6,)),
        ((0.1,), (0.0, 1e-6)),
    ],
    ids=[
        "no-thetas",
        "no-epsilons",
        "decreasing",
        "repeated",
        "theta-one",
        "negative-theta",
        "zero-epsilon",
    ],
)
def test_grid_validation(thetas, epsilons):
    with raises(DomclustInputError):
        SweepGrid(thetas=thetas, epsilons=epsilons)


def _row(theta, epsilon, mr, ari):
    return SweepRow(theta=theta, epsilon=epsilon, mr=mr, ari=ari, acp=1.0, n_clusters=2)


def test_best_cell():
    rows = [
        _row(0.3, 1e-6, 0.1, 0.9),
        _row(0.2, 1e-4, 0.0, 0.8),
        _row(0.1, 1e-4, 0.0, 0.95),
        _row(0.1, 1e-6, 0.0, 0.95),
    ]

    assert best_cell(rows) == rows[3]
    with raises(DomclustInputError):
        best_cell([])


def test_write_sweep_csv():
    stream = io.StringIO()
    write_sweep_csv([_row(0.1, 1e-6, 0.25, -0.5)], stream)

    assert stream.getvalue() == (
        "theta,epsilon,mr,ari,acp,n_clusters\n0.1,1e-06,0.25,-0.5,1.0,2\n"
    )
