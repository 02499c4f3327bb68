"""Test cosine distances, local scaling and the affinity graph."""
import io
import math
from test.automated_test import check_sizes_and_values

import pytest
import torch
from pytest import mark, raises

from domclust import verbose
from domclust.affinity import (
    SIGMA_FLOOR,
    AffinityMatrix,
    build_affinity,
    cosine_distance,
    cosine_distances,
    dump_affinity,
    local_scales,
)
from domclust.context import CTX
from domclust.embeddings import EmbeddingSet, synth_embeddings
from domclust.utils.errors import AffinityError


def embedding_set(rows):
    vectors = torch.tensor(rows, dtype=torch.float64)
    ids = [f"i{r}" for r in range(len(rows))]
    return EmbeddingSet(ids=ids, labels=None, vectors=vectors)


THREE_POINTS = embedding_set([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def test_cosine_distance():
    assert cosine_distance(torch.tensor([1.0, 0.0]), torch.tensor([0.0, 3.0])) == 1.0
    assert cosine_distance(torch.tensor([2.0, 0.0]), torch.tensor([-1.0, 0.0])) == 2.0
    assert cosine_distance(torch.tensor([1.0, 1.0]), torch.tensor([2.0, 2.0])) == 0.0


def test_cosine_distance_errors():
    with raises(AffinityError, match="zero-norm"):
        cosine_distance(torch.tensor([0.0, 0.0]), torch.tensor([1.0, 0.0]))
    with raises(AffinityError, match="shapes"):
        cosine_distance(torch.tensor([1.0]), torch.tensor([1.0, 0.0]))


def test_cosine_distances_symmetric():
    vectors = synth_embeddings(3, 4, 5, 0.5, seed=0).vectors
    distances = cosine_distances(vectors)

    assert torch.equal(distances, distances.T)
    assert (torch.diagonal(distances) == 0).all()
    assert ((distances >= 0) & (distances <= 2)).all()
    assert distances[0, 5].item() == pytest.approx(
        cosine_distance(vectors[0], vectors[5]), abs=1e-12
    )


def test_local_scales():
    assert local_scales(THREE_POINTS).tolist() == [0.5, 0.5, 1.0]


def test_local_scales_of_duplicates_use_floor():
    rows = [[1.0, 0.0]] * 10 + [[0.0, 1.0]]
    sigma = local_scales(embedding_set(rows), knn=7)

    assert (sigma[:10] == SIGMA_FLOOR).all()
    assert sigma[10].item() == 1.0


def test_local_scales_errors():
    with raises(AffinityError, match="at least 2 items"):
        local_scales(embedding_set([[1.0, 0.0]]))
    with raises(AffinityError, match="knn must be positive"):
        local_scales(THREE_POINTS, knn=0)


def test_build_affinity():
    affinity = build_affinity(THREE_POINTS)

    assert affinity.values[0, 1].item() == 1.0
    assert affinity.values[0, 2].item() == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert affinity.values[1, 2].item() == pytest.approx(math.exp(-2.0), rel=1e-12)
    AffinityMatrix.from_values(affinity.values)


def test_scale_invariance():
    embeddings = synth_embeddings(3, 4, 6, 0.3, seed=2)
    scaled = EmbeddingSet(
        ids=embeddings.ids, labels=embeddings.labels, vectors=3.7 * embeddings.vectors
    )

    check_sizes_and_values(
        build_affinity(embeddings).values, build_affinity(scaled).values, atol=1e-14
    )


def test_permutation_equivariance():
    embeddings = synth_embeddings(3, 4, 6, 0.3, seed=4)
    perm = torch.randperm(12, generator=torch.Generator().manual_seed(0)).tolist()

    original = build_affinity(embeddings).values
    permuted = build_affinity(embeddings.subset(perm)).values
    assert torch.allclose(permuted, original[perm][:, perm], atol=1e-12, rtol=0)


def test_counts_builds():
    CTX.reset_affinity_builds()
    build_affinity(THREE_POINTS)
    build_affinity(THREE_POINTS)

    assert CTX.get_affinity_builds() == 2
    CTX.reset_affinity_builds()


def test_debug_record(caplog):
    with verbose(), caplog.at_level("DEBUG", logger="domclust"):
        build_affinity(THREE_POINTS, knn=2)

    assert "Built affinity over 3 items, knn=2" in caplog.text
    assert not CTX.get_debug()


@mark.parametrize(
    "values, match",
    [
        ([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]], "square"),
        (torch.zeros(0, 0), "at least one node"),
        ([[0.0, float("inf")], [float("inf"), 0.0]], "non-finite"),
        ([[0.0, -1.0], [-1.0, 0.0]], "negative"),
        ([[0.0, 1.0], [0.5, 0.0]], "not symmetric"),
        ([[1.0, 0.0], [0.0, 0.0]], "diagonal"),
    ],
    ids=["non-square", "empty", "inf", "negative", "asymmetric", "diagonal"],
)
def test_from_values_validation(values, match):
    with raises(AffinityError, match=match):
        AffinityMatrix.from_values(values)


def test_submatrix():
    values = torch.tensor(
        [[0.0, 0.1, 0.2], [0.1, 0.0, 0.3], [0.2, 0.3, 0.0]], dtype=torch.float64
    )
    sub = AffinityMatrix.from_values(values).submatrix([2, 0])

    assert sub.n == 2
    assert sub.values.tolist() == [[0.0, 0.2], [0.2, 0.0]]


def test_dump_affinity():
    stream = io.StringIO()
    dump_affinity(AffinityMatrix.from_values([[0.0, 0.25], [0.25, 0.0]]), stream)

    assert stream.getvalue() == "# n=2\n0.0,0.25\n0.25,0.0\n"
