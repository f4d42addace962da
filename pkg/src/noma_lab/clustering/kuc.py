"""K-means++ user clustering over collinearity profiles."""

import numpy as np

from ._base import BaseUserClustering, DegenerateInstanceError, _run


def kmeanspp_probabilities(distances):
    """Seeding probabilities proportional to squared nearest-centroid distance.

    ``distances`` are already squared. All-zero input falls back to uniform.
    """
    d = np.asarray(distances, dtype=float)
    total = d.sum()
    if total <= 0:
        return np.full(d.shape, 1.0 / d.size)
    return d / total


def kmeanspp_seed(X, k, rng):
    """Indices of ``k`` seed rows chosen by D^2 weighting."""
    n = X.shape[0]
    seeds = [int(rng.integers(n))]
    D = np.sum((X - X[seeds[0]]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(rng.choice(n, p=kmeanspp_probabilities(D)))
        seeds.append(nxt)
        D = np.minimum(D, np.sum((X - X[nxt]) ** 2, axis=1))
    return seeds


def assign(X, centroids):
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1), d2


def lloyd(X, centroids, max_iter=100):
    """Lloyd iterations from ``centroids``; returns (labels, centroids, n_iter).

    Empty clusters are reseeded with the point farthest from its centroid.
    """
    centroids = np.array(centroids, dtype=float)
    labels, d2 = assign(X, centroids)
    k = centroids.shape[0]
    for it in range(1, max_iter + 1):
        for m in range(k):
            members = labels == m
            if members.any():
                centroids[m] = X[members].mean(axis=0)
            else:
                own = d2[np.arange(X.shape[0]), labels]
                far = int(np.argmax(own))
                centroids[m] = X[far]
                labels[far] = m
                d2[far] = ((X[far] - centroids) ** 2).sum(axis=1)
        new_labels, d2 = assign(X, centroids)
        if np.array_equal(new_labels, labels):
            return labels, centroids, it
        labels = new_labels
    return labels, centroids, max_iter


class KUCClustering(BaseUserClustering):
    """K-means++ on collinearity rows, then power-constrained refinement.

    After clustering, the user with the weakest ``c * g`` is evicted until
    the allocation is feasible. Requires at least ``n_clusters`` users.
    """

    def __init__(
        self,
        n_clusters=None,
        gamma_th_db=10.0,
        noise_power=0.01,
        p_max=1.0,
        max_iter=100,
        random_state=None,
    ):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max
        self.max_iter = max_iter
        self.random_state = random_state

    def _cluster(self, allocator, n_clusters):
        if allocator.n_users < n_clusters:
            raise DegenerateInstanceError(
                f"KUC needs at least {n_clusters} users, got {allocator.n_users}"
            )
        rng = np.random.default_rng(self.random_state)
        X = allocator.C
        seeds = kmeanspp_seed(X, n_clusters, rng)
        labels, centroids, n_iter = lloyd(X, X[seeds], self.max_iter)
        self.kmeans_labels_ = labels
        self.cluster_centers_ = centroids
        self.n_iter_ = n_iter
        clusters = [np.flatnonzero(labels == m).tolist() for m in range(n_clusters)]
        return allocator.prune(clusters, fast=False).assignment.clusters


def kuc(channels, C=None, max_iter=100, seed=None, **params):
    """Functional form of :class:`KUCClustering`; returns (assignment, solution)."""
    return _run(KUCClustering(max_iter=max_iter, random_state=seed, **params), channels, C)
