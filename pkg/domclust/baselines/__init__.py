"""Comparison clusterer and cluster-count estimate."""
from domclust.baselines.eigengap import eigengap_estimate, normalized_laplacian
from domclust.baselines.kmeans import KMeansConfig, kmeans_cosine

__all__ = ["KMeansConfig", "eigengap_estimate", "kmeans_cosine", "normalized_laplacian"]
