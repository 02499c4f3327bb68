"""
Basic usage
==============================

Cluster synthetic speaker embeddings into dominant sets,
evaluate the result, and compare it with k-means.
"""

# %%
# Let's start by generating 40 speakers with 2 utterances each

from domclust import (
    KMeansConfig,
    SolverConfig,
    build_affinity,
    eigengap_estimate,
    evaluate,
    kmeans_cosine,
    peel_clusters,
)
from domclust.embeddings import synth_embeddings

embeddings = synth_embeddings(
    n_clusters=40, points_per_cluster=2, dim=64, noise_scale=0.05, seed=0
)
affinity = build_affinity(embeddings, knn=7)

# %%
# Dominant sets
# ----------------------

clustering = peel_clusters(affinity, SolverConfig(theta=0.1, epsilon=1e-6))
report = evaluate(clustering, embeddings.labels, labeling="hungarian")

print("clusters:", report.n_clusters)
print("MR:      ", report.mr)
print("ARI:     ", report.ari)
print("ACP:     ", report.acp)

# %%
# The first cluster and the weights of its members

first = clustering.clusters[0]
for member, weight in zip(first.members, first.weights):
    print(embeddings.ids[member], weight)

# %%
# k-means with the number of clusters from the eigengap
# ------------------------------------------------------

k = eigengap_estimate(affinity)
baseline = kmeans_cosine(embeddings, KMeansConfig(k=k))
print("eigengap k:", k)
print(evaluate(baseline, embeddings.labels, labeling="hungarian"))
