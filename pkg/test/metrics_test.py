"""Test misclassification rate, adjusted Rand index and cluster purity."""
import io
from fractions import Fraction
from itertools import combinations, permutations

import pytest
import torch
from pytest import mark, raises

from domclust.clustering import Cluster, Clustering
from domclust.labeling import UNASSIGNED, LabelAssignment, label_hungarian
from domclust.metrics import (
    adjusted_rand_index,
    average_cluster_purity,
    evaluate,
    misclassification_rate,
)
from domclust.utils.errors import DomclustInputError, LabelingError


def partition(*groups, n_items=None, source="external"):
    """Clustering of explicitly listed member groups, ranked in order."""
    n_items = sum(len(g) for g in groups) if n_items is None else n_items
    clusters = tuple(Cluster.uniform(group, rank) for rank, group in enumerate(groups))
    return Clustering(clusters=clusters, n_items=n_items, source=source)


def pair_counting_ari(clusters, truth):
    """Adjusted Rand index by enumerating all item pairs."""
    n = len(truth)
    both = same_cluster = same_label = 0
    for i, j in combinations(range(n), 2):
        in_cluster = clusters[i] == clusters[j]
        in_label = truth[i] == truth[j]
        same_cluster += in_cluster
        same_label += in_label
        both += in_cluster and in_label
    pairs = n * (n - 1) // 2
    expected = Fraction(same_cluster * same_label, pairs)
    maximum = Fraction(same_cluster + same_label, 2)
    if maximum == expected:
        return 0.0
    return float((both - expected) / (maximum - expected))


# speakers A and B with two utterances each, items ordered a1, a2, b1, b2
TRUTH_AB = ["A", "A", "B", "B"]
CROSSED = partition([0, 2], [1, 3])
PERFECT = partition([0, 1], [2, 3])


def test_crossed_clusters():
    assert adjusted_rand_index(CROSSED, TRUTH_AB) == pytest.approx(-0.5)
    assert average_cluster_purity(CROSSED, TRUTH_AB) == 0.5

    mr, errors = misclassification_rate(
        CROSSED, TRUTH_AB, label_hungarian(CROSSED, TRUTH_AB)
    )
    assert mr == 0.5
    assert sum(errors.values()) == 2


def test_perfect_clusters():
    report = evaluate(PERFECT, TRUTH_AB)

    assert (report.mr, report.ari, report.acp) == (0.0, 1.0, 1.0)
    assert report.per_speaker_errors == {"A": 0, "B": 0}
    assert report.n_clusters == 2


def test_single_cluster_of_forty_speakers():
    truth = [f"spk{j:02d}" for j in range(40) for _ in range(2)]
    clustering = partition(list(range(80)))
    report = evaluate(clustering, truth)

    assert report.mr == 0.975
    assert sum(report.per_speaker_errors.values()) == 78
    assert report.per_speaker_errors["spk00"] == 0


def test_singletons_are_pure():
    truth = ["a", "b", "a", "c", "b"]
    clustering = partition(*[[i] for i in range(5)])

    assert average_cluster_purity(clustering, truth) == 1.0


def test_unassigned_members_count_as_errors():
    clustering = partition([0, 1], [2], [3])
    truth = ["a", "a", "a", "b"]
    assignment = LabelAssignment(mapping={0: "a", 1: UNASSIGNED, 2: "b"}, method="max")
    mr, errors = misclassification_rate(clustering, truth, assignment)

    assert mr == 0.25
    assert errors == {"a": 1, "b": 0}


def test_incomplete_assignment():
    assignment = LabelAssignment(mapping={0: "A"}, method="hungarian")
    with raises(LabelingError, match="no entry for cluster 1"):
        misclassification_rate(CROSSED, TRUTH_AB, assignment)


def test_ari_trivial_partitions_are_zero():
    assert adjusted_rand_index(partition([0, 1, 2]), ["a", "a", "a"]) == 0.0
    assert adjusted_rand_index(partition([0], [1], [2]), ["a", "b", "c"]) == 0.0


def test_ari_one_trivial_side():
    assert adjusted_rand_index(partition([0, 1, 2]), ["a", "b", "c"]) == 0.0
    assert adjusted_rand_index(partition([0], [1], [2]), ["a", "a", "a"]) == 0.0
    assert adjusted_rand_index(partition([0, 1], [2]), ["a", "a", "b"]) == 1.0


def test_ari_needs_two_items():
    with raises(DomclustInputError):
        adjusted_rand_index(partition([0]), ["a"])


def test_ari_accepts_cluster_ids():
    assert adjusted_rand_index(["x", "y", "x", "y"], TRUTH_AB) == pytest.approx(-0.5)


def _random_pair(generator):
    n = int(torch.randint(2, 13, (1,), generator=generator))
    n_clusters, n_labels = torch.randint(1, n + 1, (2,), generator=generator).tolist()
    clusters = torch.randint(n_clusters, (n,), generator=generator)
    truth = torch.randint(n_labels, (n,), generator=generator)
    return clusters.tolist(), [f"t{t}" for t in truth.tolist()]


def _check_ari(clusters, truth):
    ari = adjusted_rand_index(clusters, truth)

    assert ari == pytest.approx(pair_counting_ari(clusters, truth), abs=1e-12)
    assert ari == pytest.approx(
        adjusted_rand_index(truth, [f"c{c}" for c in clusters]), abs=1e-12
    )


@mark.parametrize("seed", range(10))
def test_ari_pair_counting_reduced(seed):
    _check_ari(*_random_pair(torch.Generator().manual_seed(seed)))


@pytest.mark.fuzz
def test_ari_pair_counting():
    generator = torch.Generator().manual_seed(0)
    for _ in range(100):
        _check_ari(*_random_pair(generator))


def test_merging_pure_clusters_lowers_purity():
    truth = ["a", "a", "b", "b", "b", "c"]
    pure = partition([0, 1], [2, 3, 4], [5])
    merged = partition([0, 1, 2, 3, 4], [5])

    assert average_cluster_purity(pure, truth) == 1.0
    assert average_cluster_purity(merged, truth) < 1.0


def _all_assignments(n_clusters, labels):
    """Every injective mapping of cluster ranks into labels, gaps unassigned."""
    slots = list(labels) + [UNASSIGNED] * n_clusters
    seen = set()
    for perm in permutations(slots, n_clusters):
        if perm in seen:
            continue
        seen.add(perm)
        used = [label for label in perm if label is not UNASSIGNED]
        if len(used) == len(set(used)):
            yield dict(enumerate(perm))


@mark.parametrize("seed", range(5))
def test_hungarian_minimizes_misclassification(seed):
    generator = torch.Generator().manual_seed(seed)
    n = 10
    ranks = torch.randint(4, (n,), generator=generator).tolist()
    groups = [[i for i in range(n) if ranks[i] == r] for r in range(4)]
    clustering = partition(*[g for g in groups if g])
    truth = [f"s{t}" for t in torch.randint(3, (n,), generator=generator).tolist()]

    best, _ = misclassification_rate(
        clustering, truth, label_hungarian(clustering, truth)
    )
    for mapping in _all_assignments(clustering.n_clusters, sorted(set(truth))):
        other, _ = misclassification_rate(
            clustering, truth, LabelAssignment(mapping=mapping, method="max")
        )
        assert best <= other


def test_report_csv_and_json():
    report = evaluate(CROSSED, TRUTH_AB)
    stream = io.StringIO()
    report.write_csv(stream)

    assert stream.getvalue() == "mr,ari,acp,n_clusters\n0.5,-0.5,0.5,2\n"
    document = report.to_json()
    assert document["assignment"] == {
        "method": "hungarian",
        "mapping": {"0": "A", "1": "B"},
    }
    assert document["per_speaker_errors"] == {"A": 1, "B": 1}
